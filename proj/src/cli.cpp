#include "dualest/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "dualest/config.hpp"
#include "dualest/cost.hpp"
#include "dualest/csv.hpp"
#include "dualest/kalman.hpp"
#include "dualest/version.hpp"

namespace dualest::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) { return format_number(v); }
std::string num(long v) { return format_number(v); }
std::string num(int v) { return format_number(static_cast<long>(v)); }

void provenance(CsvWriter& csv, const ScenarioConfig& cfg) {
  csv.comment("seed=" + std::to_string(cfg.seed) + " T=" + num(cfg.horizon) +
              " dt=" + num(cfg.dt) + " trials=" + num(cfg.trials) +
              " version=" + std::string(kVersion));
}

Scenario make_scenario(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioConfig::Kind::FiniteState) {
    throw ConfigError("config", 0, "this subcommand needs kind = finite-state");
  }
  return Scenario(RateMatrix(cfg.a), ObservationModel(cfg.h, cfg.r), cfg.pi0, cfg.f,
                  cfg.make_grid());
}

LinearModel make_linear_model(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioConfig::Kind::LinearGaussian) {
    throw ConfigError("config", 0, "this subcommand needs kind = linear-gaussian");
  }
  return LinearModel(cfg.a, cfg.h, cfg.q, cfg.r, cfg.x0hat, cfg.sigma0);
}

ControlVariant cfg_variant(const ScenarioConfig& cfg, const std::string& name) {
  VariantOptions options;
  options.det_gain = cfg.det_gain;
  options.det_offset = cfg.det_offset;
  options.offset_kind = cfg.offset_kind;
  options.offset_scale = cfg.offset_scale;
  options.offset_seed = cfg.offset_seed;
  try {
    return variant_from_name(name, cfg.d, cfg.m, options);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config", 0, e.what());
  }
}

std::vector<std::string> path_header(const std::string& stem, int n) {
  std::vector<std::string> cols;
  for (int i = 1; i <= n; ++i) cols.push_back(stem + "_" + std::to_string(i));
  return cols;
}

int cmd_simulate(const ScenarioConfig& cfg, const fs::path& out) {
  const Scenario sc = make_scenario(cfg);
  Rng rng(derive_seed(cfg.seed, 0));
  const JumpPath x = simulate_ctmc(sc.rates, sc.pi0, sc.grid.horizon(), rng);
  const ObservationRecord obs = simulate_observation(x, sc.model, sc.grid, rng);

  {
    CsvWriter csv((out / "signal.csv").string());
    provenance(csv, cfg);
    csv.header({"jump_index", "time", "state"});
    csv.row({num(0), num(0.0), num(x.states[0])});
    for (int j = 0; j < x.jump_count(); ++j) {
      csv.row({num(j + 1), num(x.jump_times[j]), num(x.states[j + 1])});
    }
  }
  {
    CsvWriter csv((out / "observation.csv").string());
    provenance(csv, cfg);
    std::vector<std::string> cols{"time"};
    for (const auto& c : path_header("z", sc.m())) cols.push_back(c);
    for (const auto& c : path_header("w", sc.m())) cols.push_back(c);
    csv.header(cols);
    for (int k = 0; k <= sc.grid.steps(); k += cfg.output_stride) {
      std::vector<std::string> row{num(sc.grid.time(k))};
      for (int i = 0; i < sc.m(); ++i) row.push_back(num(obs.z.at(k)[i]));
      for (int i = 0; i < sc.m(); ++i) row.push_back(num(obs.w.at(k)[i]));
      csv.row(row);
    }
  }
  return 0;
}

int cmd_filter(const ScenarioConfig& cfg, const fs::path& out) {
  const Scenario sc = make_scenario(cfg);
  Rng rng(derive_seed(cfg.seed, 0));
  const JumpPath x = simulate_ctmc(sc.rates, sc.pi0, sc.grid.horizon(), rng);
  const ObservationRecord obs = simulate_observation(x, sc.model, sc.grid, rng);
  const FilterResult filter = run_wonham(obs.z, sc.pi0, sc.rates, sc.model);
  const VectorPath reference = bayes_oracle(obs.z, sc.pi0, sc.rates, sc.model);

  {
    CsvWriter csv((out / "filter.csv").string());
    provenance(csv, cfg);
    csv.comment("clamp_steps=" + num(filter.clamp_count));
    std::vector<std::string> cols{"time"};
    for (const auto& c : path_header("pi", sc.d())) cols.push_back(c);
    for (const auto& c : path_header("oracle", sc.d())) cols.push_back(c);
    cols.push_back("gap_l1");
    csv.header(cols);
    for (int k = 0; k <= sc.grid.steps(); k += cfg.output_stride) {
      std::vector<std::string> row{num(sc.grid.time(k))};
      for (int i = 0; i < sc.d(); ++i) row.push_back(num(filter.pi.at(k)[i]));
      for (int i = 0; i < sc.d(); ++i) row.push_back(num(reference.at(k)[i]));
      row.push_back(num((filter.pi.at(k) - reference.at(k)).lpNorm<1>()));
      csv.row(row);
    }
  }
  {
    CsvWriter csv((out / "gains.csv").string());
    provenance(csv, cfg);
    std::vector<std::string> cols{"time"};
    for (int i = 1; i <= sc.d(); ++i) {
      for (int j = 1; j <= sc.m(); ++j) {
        cols.push_back("k_" + std::to_string(i) + std::to_string(j));
      }
    }
    csv.header(cols);
    for (int k = 0; k <= sc.grid.steps(); k += cfg.output_stride) {
      std::vector<std::string> row{num(sc.grid.time(k))};
      for (int i = 0; i < sc.d(); ++i) {
        for (int j = 0; j < sc.m(); ++j) row.push_back(num(filter.gain.at(k)(i, j)));
      }
      csv.row(row);
    }
  }
  return 0;
}

void write_duality_outputs(const ScenarioConfig& cfg, const ExperimentResult& result,
                           const fs::path& out) {
  {
    CsvWriter csv((out / "trials.csv").string());
    provenance(csv, cfg);
    csv.header({"variant", "trial", "excluded", "initial_term", "control_energy",
                "quadratic_variation_term", "martingale_term", "total", "estimate", "target",
                "mse"});
    for (const auto& variant : result.variants) {
      for (const auto& rec : variant.trials) {
        csv.row({variant.name, num(rec.trial), num(rec.excluded ? 1 : 0),
                 num(rec.cost.initial_term), num(rec.cost.control_energy),
                 num(rec.cost.quadratic_variation_term), num(rec.cost.martingale_term),
                 num(rec.cost.total), num(rec.estimate), num(rec.target), num(rec.mse)});
      }
    }
  }
  {
    CsvWriter csv((out / "summary.csv").string());
    provenance(csv, cfg);
    csv.header({"variant", "trials_used", "excluded", "clamp_steps", "filter_steps",
                "initial_mean", "initial_se", "energy_mean", "energy_se", "qv_mean", "qv_se",
                "martingale_mean", "martingale_se", "j_mean", "j_se", "mse_mean", "mse_se",
                "duality_gap", "combined_se"});
    for (const auto& variant : result.variants) {
      const double gap = std::abs(variant.total.mean - variant.mse.mean);
      const double combined =
          std::sqrt(variant.total.se * variant.total.se + variant.mse.se * variant.mse.se);
      csv.row({variant.name, num(variant.total.count), num(variant.excluded),
               num(variant.clamp_steps), num(variant.filter_steps), num(variant.initial_term.mean),
               num(variant.initial_term.se), num(variant.control_energy.mean),
               num(variant.control_energy.se), num(variant.quadratic_variation_term.mean),
               num(variant.quadratic_variation_term.se), num(variant.martingale_term.mean),
               num(variant.martingale_term.se), num(variant.total.mean), num(variant.total.se),
               num(variant.mse.mean), num(variant.mse.se), num(gap), num(combined)});
    }
  }
}

int cmd_duality(const ScenarioConfig& cfg, const fs::path& out) {
  const Scenario sc = make_scenario(cfg);
  std::vector<ControlVariant> variants;
  for (const auto& name : cfg.variants) variants.push_back(cfg_variant(cfg, name));
  const ExperimentResult result = cost_monte_carlo(sc, variants, cfg.trials, cfg.seed);
  write_duality_outputs(cfg, result, out);

  bool any_used = false;
  for (const auto& variant : result.variants) any_used = any_used || variant.total.count > 0;
  return any_used ? 0 : 2;
}

int cmd_kalman(const ScenarioConfig& cfg, const fs::path& out) {
  const LinearModel model = make_linear_model(cfg);
  const TimeGrid grid = cfg.make_grid();
  const Vector f = cfg.f;

  const DualityReport report = duality_check(model, grid);
  const DualLqResult lq = dual_lq_solve(model, f, grid);
  const MatrixPath sigma = covariance_riccati(model, grid);
  const double predicted = 0.5 * f.dot(sigma.at(grid.steps()) * f);
  const LinearMseResult mse = linear_estimator_mse(model, f, grid, cfg.trials, cfg.seed);

  {
    CsvWriter csv((out / "covariance.csv").string());
    provenance(csv, cfg);
    std::vector<std::string> cols{"time"};
    const int d = model.signal_dim();
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j) cols.push_back("sigma_" + std::to_string(i) + std::to_string(j));
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j)
        cols.push_back("dual_p_" + std::to_string(i) + std::to_string(j));
    cols.push_back("frobenius_gap");
    csv.header(cols);
    const MatrixPath p = control_riccati(model, grid);
    for (int k = 0; k <= grid.steps(); k += cfg.output_stride) {
      std::vector<std::string> row{num(grid.time(k))};
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) row.push_back(num(sigma.at(k)(i, j)));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) row.push_back(num(p.at(grid.steps() - k)(i, j)));
      row.push_back(num(report.gap.values[k]));
      csv.row(row);
    }
  }
  {
    CsvWriter csv((out / "kalman.csv").string());
    provenance(csv, cfg);
    csv.header({"max_duality_gap", "tolerance", "duality_pass", "lq_cost", "half_f_sigma_f",
                "cost_gap", "mse", "mse_se", "predicted_mse", "trials"});
    csv.row({num(report.max_gap), num(report.tolerance), num(report.pass ? 1 : 0), num(lq.cost),
             num(predicted), num(std::abs(lq.cost - predicted)), num(mse.stats.mse),
             num(mse.stats.se), num(mse.predicted_mse), num(mse.stats.trials)});
  }
  return 0;
}

int cmd_sweep(const ScenarioConfig& cfg, const fs::path& out) {
  if (cfg.sweep_values.empty()) {
    throw ConfigError("config", 0, "sweep needs sweep_values");
  }
  const bool over_dt = cfg.sweep == "dt";

  std::vector<double> oracle_gaps;
  if (over_dt) {
    const Scenario probe = make_scenario(cfg);
    oracle_gaps = filter_gap_study(probe.rates, probe.model, probe.pi0, cfg.horizon,
                                   cfg.sweep_values, cfg.filter_seeds, cfg.seed);
  }

  CsvWriter csv((out / "sweep.csv").string());
  provenance(csv, cfg);
  csv.header({"param", "value", "variant", "trials_used", "excluded", "j_mean", "j_se",
              "mse_mean", "mse_se", "duality_gap", "combined_se", "oracle_gap"});
  for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
    ScenarioConfig point = cfg;
    if (over_dt) {
      point.dt = cfg.sweep_values[i];
    } else {
      point.trials = static_cast<int>(cfg.sweep_values[i]);
    }
    const Scenario sc = make_scenario(point);
    std::vector<ControlVariant> variants;
    for (const auto& name : point.variants) variants.push_back(cfg_variant(point, name));
    const ExperimentResult result = cost_monte_carlo(sc, variants, point.trials, point.seed);
    for (const auto& variant : result.variants) {
      const double gap = std::abs(variant.total.mean - variant.mse.mean);
      const double combined =
          std::sqrt(variant.total.se * variant.total.se + variant.mse.se * variant.mse.se);
      csv.row({cfg.sweep, num(cfg.sweep_values[i]), variant.name, num(variant.total.count),
               num(variant.excluded), num(variant.total.mean), num(variant.total.se),
               num(variant.mse.mean), num(variant.mse.se), num(gap), num(combined),
               num(over_dt ? oracle_gaps[i] : std::nan(""))});
    }
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Duality-based minimum-variance estimation for finite-state Markov chains"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file")->required();
    cmd->add_option("--out", out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", seed_override, "override the config seed");
    cmd->add_option("--trials", trials_override, "override the config trial count");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "emit one signal/observation draw as CSV");
  CLI::App* filter = app.add_subcommand("filter", "run the filter and its reference on one draw");
  CLI::App* duality =
      app.add_subcommand("duality", "Monte Carlo dual cost vs estimator error per variant");
  CLI::App* kalman = app.add_subcommand("kalman", "linear-Gaussian benchmark suite");
  CLI::App* sweep = app.add_subcommand("sweep", "repeat duality over a grid of dt or trials");
  for (CLI::App* cmd : {simulate, filter, duality, kalman, sweep}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    ScenarioConfig cfg = parse_config_file(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (trials_override) cfg.trials = *trials_override;

    const fs::path out(out_dir);
    fs::create_directories(out);

    if (simulate->parsed()) return cmd_simulate(cfg, out);
    if (filter->parsed()) return cmd_filter(cfg, out);
    if (duality->parsed()) return cmd_duality(cfg, out);
    if (kalman->parsed()) return cmd_kalman(cfg, out);
    return cmd_sweep(cfg, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("dualest");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dualest::cli

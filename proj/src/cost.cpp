#include "dualest/cost.hpp"

#include <cmath>

#include "dualest/numerics.hpp"

namespace dualest {

Scenario::Scenario(RateMatrix rates_in, ObservationModel model_in, Vector pi0_in, Vector f_in,
                   TimeGrid grid_in)
    : rates(std::move(rates_in)), model(std::move(model_in)), pi0(std::move(pi0_in)),
      f(std::move(f_in)), grid(grid_in) {
  if (model.signal_dim() != rates.dim()) {
    throw std::invalid_argument("Scenario: observation map rows must match the state dimension");
  }
  if (pi0.size() != rates.dim() || f.size() != rates.dim()) {
    throw std::invalid_argument("Scenario: pi0 and f must have the state dimension");
  }
  validate_simplex(pi0);
}

ControlVariant ControlVariant::zero() {
  ControlVariant v;
  v.name = "zero";
  return v;
}

ControlVariant ControlVariant::deterministic(std::string name, DetGainFn gain, DetOffsetFn offset) {
  ControlVariant v;
  v.name = std::move(name);
  v.det_gain = std::move(gain);
  v.det_offset = std::move(offset);
  return v;
}

ControlVariant ControlVariant::optimal() {
  ControlVariant v;
  v.name = "optimal";
  v.use_filter_gain = true;
  return v;
}

ControlVariant ControlVariant::optimal_plus_deterministic(std::string name, DetOffsetFn offset) {
  ControlVariant v;
  v.name = std::move(name);
  v.use_filter_gain = true;
  v.det_offset = std::move(offset);
  return v;
}

ControlVariant ControlVariant::optimal_plus_adapted(std::string name, AdaptedOffsetFn offset) {
  ControlVariant v;
  v.name = std::move(name);
  v.use_filter_gain = true;
  v.adapted_offset = std::move(offset);
  return v;
}

SummaryStat summarize(const std::vector<double>& values) {
  SummaryStat stat;
  stat.count = static_cast<int>(values.size());
  if (stat.count == 0) return stat;
  double sum = 0.0;
  for (double v : values) sum += v;
  stat.mean = sum / stat.count;
  if (stat.count < 2) return stat;
  double ss = 0.0;
  for (double v : values) ss += (v - stat.mean) * (v - stat.mean);
  stat.se = std::sqrt(ss / (stat.count - 1)) / std::sqrt(static_cast<double>(stat.count));
  return stat;
}

namespace {

struct JumpInCell {
  int cell;      // grid cell containing the jump
  Vector delta;  // e_to - e_from
};

std::vector<JumpInCell> jumps_by_cell(const JumpPath& path, const TimeGrid& grid) {
  std::vector<JumpInCell> out;
  out.reserve(path.jump_times.size());
  const double dt = grid.dt();
  for (std::size_t j = 0; j < path.jump_times.size(); ++j) {
    int cell = static_cast<int>(path.jump_times[j] / dt);
    if (cell >= grid.steps()) cell = grid.steps() - 1;
    Vector delta = Vector::Zero(path.dim);
    delta[path.states[j + 1]] = 1.0;
    delta[path.states[j]] = -1.0;
    out.push_back({cell, std::move(delta)});
  }
  return out;
}

ControlSchedule build_schedule(const Scenario& sc, const ControlVariant& variant,
                               const FilterResult* filter, const VectorPath* z) {
  const TimeGrid& grid = sc.grid;
  ControlSchedule ctrl(grid, sc.d(), sc.m());
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    if (variant.use_filter_gain) {
      ctrl.gain.at(k) = filter->gain.at(k);
    } else if (variant.det_gain) {
      ctrl.gain.at(k) = variant.det_gain(k, t);
    }
    if (variant.det_offset) {
      ctrl.offset.at(k) = variant.det_offset(k, t);
    }
    if (variant.adapted_offset) {
      ctrl.offset.at(k) += variant.adapted_offset(k, t, z->at(k));
    }
  }
  return ctrl;
}

/// Everything trial-independent a variant may carry: for fully deterministic
/// controls the dual solution and its split are fixed across trials.
struct PreparedVariant {
  const ControlVariant* spec;
  std::optional<ControlSchedule> det_ctrl;
  std::optional<DualPath> det_dual;
  std::optional<DualDecomposition> det_decomp;
};

TrialRecord evaluate_trial(const Scenario& sc, const ControlSchedule& ctrl, const DualPath& dual,
                           const DualDecomposition& decomp, const JumpPath& x,
                           const VectorPath& z, const VectorPath& w, const VectorPath& b,
                           const std::vector<JumpInCell>& jumps) {
  const TimeGrid& grid = sc.grid;
  const double dt = grid.dt();
  const Vector y0 = dual.y.at(0);
  const Vector x0 = state_vector(x, 0.0);

  TrialRecord rec;
  const double e0 = y0.dot(x0 - sc.pi0);
  rec.cost.initial_term = 0.5 * e0 * e0;

  // Control energy: trapezoid of the dt-integrand (not a stochastic integral).
  double energy = 0.0;
  for (int k = 0; k <= grid.steps(); ++k) {
    const double quad = 0.5 * dual.u.at(k).dot(sc.model.r() * dual.u.at(k));
    energy += (k == 0 || k == grid.steps()) ? 0.5 * quad : quad;
  }
  rec.cost.control_energy = energy * dt;

  for (const auto& jump : jumps) {
    const double hit = dual.y.at(jump.cell).dot(jump.delta);
    rec.cost.quadratic_variation_term += 0.5 * hit * hit;
  }

  const ScalarPath err = error_process(y0, decomp, x0, sc.pi0, w, b);
  double mart = 0.0;
  for (int k = 0; k < grid.steps(); ++k) {
    const Vector dw = w.at(k + 1) - w.at(k);
    const Vector db = b.at(k + 1) - b.at(k);
    mart += err.values[k] * (dual.u.at(k).dot(dw) + dual.y.at(k).dot(db));
  }
  rec.cost.martingale_term = mart;

  rec.cost.total = rec.cost.initial_term + rec.cost.control_energy +
                   rec.cost.quadratic_variation_term + rec.cost.martingale_term;
  rec.estimate = estimator(y0, sc.pi0, decomp, z);
  rec.target = sc.f.dot(state_vector(x, grid.horizon()));
  const double gap = rec.estimate - rec.target;
  rec.mse = 0.5 * gap * gap;
  return rec;
}

}  // namespace

ExperimentResult cost_monte_carlo(const Scenario& sc, const std::vector<ControlVariant>& variants,
                                  int trials, std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("cost_monte_carlo: need at least two trials");

  std::vector<PreparedVariant> prepared;
  prepared.reserve(variants.size());
  bool any_filter = false;
  for (const auto& variant : variants) {
    PreparedVariant p{&variant, std::nullopt, std::nullopt, std::nullopt};
    any_filter = any_filter || variant.use_filter_gain;
    if (variant.dual_is_deterministic()) {
      p.det_ctrl = build_schedule(sc, variant, nullptr, nullptr);
      p.det_dual = solve_backward(sc.rates, sc.model, *p.det_ctrl, sc.f, sc.grid);
      p.det_decomp = decompose(*p.det_dual, *p.det_ctrl, sc.rates, sc.model);
    }
    prepared.push_back(std::move(p));
  }

  ExperimentResult result;
  result.variants.resize(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    result.variants[i].name = variants[i].name;
    result.variants[i].trials.reserve(trials);
  }

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    const JumpPath x = simulate_ctmc(sc.rates, sc.pi0, sc.grid.horizon(), rng);
    const ObservationRecord obs = simulate_observation(x, sc.model, sc.grid, rng);
    const VectorPath b = martingale_part(x, sc.rates, sc.grid);
    const auto jumps = jumps_by_cell(x, sc.grid);

    std::optional<FilterResult> filter;
    bool filter_ok = true;
    if (any_filter) {
      try {
        filter = run_wonham(obs.z, sc.pi0, sc.rates, sc.model);
      } catch (const FilterBlowupError&) {
        filter_ok = false;
      }
    }

    // Transition matrix for the filter gain, shared by the filter-based variants.
    std::optional<MatrixPath> filter_phi;

    for (std::size_t i = 0; i < prepared.size(); ++i) {
      auto& out = result.variants[i];
      const ControlVariant& spec = *prepared[i].spec;
      if (spec.use_filter_gain) {
        out.filter_steps += sc.grid.steps();
        if (!filter_ok) {
          TrialRecord rec;
          rec.trial = trial;
          rec.excluded = true;
          out.trials.push_back(rec);
          ++out.excluded;
          continue;
        }
        out.clamp_steps += filter->clamp_count;
      }

      TrialRecord rec;
      if (prepared[i].det_dual) {
        rec = evaluate_trial(sc, *prepared[i].det_ctrl, *prepared[i].det_dual,
                             *prepared[i].det_decomp, x, obs.z, obs.w, b, jumps);
      } else {
        const ControlSchedule ctrl =
            build_schedule(sc, spec, filter ? &*filter : nullptr, &obs.z);
        const DualPath dual = solve_backward(sc.rates, sc.model, ctrl, sc.f, sc.grid);
        DualDecomposition decomp(sc.grid, sc.d(), sc.m());
        if (spec.use_filter_gain) {
          if (!filter_phi) {
            filter_phi = transition_matrix(sc.rates, sc.model, ctrl.gain, sc.grid);
          }
          decomp = decompose_with(dual, ctrl, sc.rates, sc.model, *filter_phi);
        } else {
          decomp = decompose(dual, ctrl, sc.rates, sc.model);
        }
        rec = evaluate_trial(sc, ctrl, dual, decomp, x, obs.z, obs.w, b, jumps);
      }
      rec.trial = trial;
      out.trials.push_back(rec);
    }
  }

  for (auto& variant : result.variants) {
    std::vector<double> initial, energy, qv, mart, total, mse;
    for (const auto& rec : variant.trials) {
      if (rec.excluded) continue;
      initial.push_back(rec.cost.initial_term);
      energy.push_back(rec.cost.control_energy);
      qv.push_back(rec.cost.quadratic_variation_term);
      mart.push_back(rec.cost.martingale_term);
      total.push_back(rec.cost.total);
      mse.push_back(rec.mse);
    }
    variant.initial_term = summarize(initial);
    variant.control_energy = summarize(energy);
    variant.quadratic_variation_term = summarize(qv);
    variant.martingale_term = summarize(mart);
    variant.total = summarize(total);
    variant.mse = summarize(mse);
  }
  return result;
}

AdaptedOffsetFn make_adapted_offset(int m, double scale, std::uint64_t seed) {
  Rng rng(seed);
  Vector c0(m), c2(m), weights(m);
  Matrix c1(m, m);
  for (int i = 0; i < m; ++i) c0[i] = 2.0 * rng.uniform() - 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) c1(i, j) = rng.uniform() - 0.5;
  for (int i = 0; i < m; ++i) c2[i] = 2.0 * rng.uniform() - 1.0;
  for (int i = 0; i < m; ++i) weights[i] = 2.0 * rng.uniform() - 1.0;
  const double omega = 1.0 + 5.0 * rng.uniform();
  return [=](int, double t, const Vector& z) -> Vector {
    return scale * (c0 + c1 * z + c2 * std::sin(omega * t + weights.dot(z)));
  };
}

ControlVariant variant_from_name(const std::string& name, int d, int m,
                                 const VariantOptions& options) {
  if (name == "zero") return ControlVariant::zero();
  if (name == "optimal") return ControlVariant::optimal();
  if (name == "deterministic") {
    const Matrix gain = options.det_gain.size() ? options.det_gain : Matrix(Matrix::Zero(d, m));
    const Vector offset = options.det_offset.size() ? options.det_offset : Vector(Vector::Zero(m));
    return ControlVariant::deterministic(
        "deterministic", [gain](int, double) { return gain; },
        [offset](int, double) { return offset; });
  }
  if (name == "optimal+v") {
    if (options.offset_kind == "constant") {
      const Vector offset = options.det_offset.size()
                                ? options.det_offset
                                : Vector(Vector::Constant(m, options.offset_scale));
      return ControlVariant::optimal_plus_deterministic(
          "optimal+v", [offset](int, double) { return offset; });
    }
    return ControlVariant::optimal_plus_adapted(
        "optimal+v", make_adapted_offset(m, options.offset_scale, options.offset_seed));
  }
  throw std::invalid_argument("unknown control variant '" + name +
                              "' (expected zero | deterministic | optimal | optimal+v)");
}

std::vector<double> filter_gap_study(const RateMatrix& rates, const ObservationModel& model,
                                     const Vector& pi0, double horizon,
                                     const std::vector<double>& dts, int seeds,
                                     std::uint64_t seed) {
  if (dts.empty()) throw std::invalid_argument("filter_gap_study: no step sizes");
  double fine_dt = dts[0];
  for (double dt : dts) fine_dt = std::min(fine_dt, dt);
  const TimeGrid fine_grid = TimeGrid::with_step(horizon, fine_dt);

  std::vector<int> strides;
  for (double dt : dts) {
    const double ratio = dt / fine_dt;
    const int stride = static_cast<int>(ratio + 0.5);
    if (std::abs(ratio - stride) > 1e-9 || fine_grid.steps() % stride != 0) {
      throw std::invalid_argument("filter_gap_study: step sizes must nest");
    }
    strides.push_back(stride);
  }

  std::vector<double> gap_sums(dts.size(), 0.0);
  for (int s = 0; s < seeds; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const JumpPath x = simulate_ctmc(rates, pi0, horizon, rng);
    const ObservationRecord obs = simulate_observation(x, model, fine_grid, rng);

    for (std::size_t i = 0; i < dts.size(); ++i) {
      const TimeGrid grid = TimeGrid::with_step(horizon, dts[i]);
      VectorPath z(grid, model.obs_dim());
      for (int k = 0; k <= grid.steps(); ++k) z.at(k) = obs.z.at(k * strides[i]);
      const FilterResult filter = run_wonham(z, pi0, rates, model);
      const VectorPath reference = bayes_oracle(z, pi0, rates, model);
      double sup = 0.0;
      for (int k = 0; k <= grid.steps(); ++k) {
        sup = std::max(sup, (filter.pi.at(k) - reference.at(k)).lpNorm<1>());
      }
      gap_sums[i] += sup;
    }
  }
  for (double& g : gap_sums) g /= seeds;
  return gap_sums;
}

double deterministic_cost(const Scenario& sc, const DetGainFn& gain, const DetOffsetFn& offset) {
  const TimeGrid& grid = sc.grid;
  ControlSchedule ctrl(grid, sc.d(), sc.m());
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    if (gain) ctrl.gain.at(k) = gain(k, t);
    if (offset) ctrl.offset.at(k) = offset(k, t);
  }
  const DualPath dual = solve_backward(sc.rates, sc.model, ctrl, sc.f, grid);

  const Matrix sigma0 = conditional_covariance(sc.pi0);
  double cost = 0.5 * dual.y.at(0).dot(sigma0 * dual.y.at(0));

  std::vector<Matrix> jump_cov(sc.d());
  for (int i = 0; i < sc.d(); ++i) jump_cov[i] = q_of_state(sc.rates, i);

  const Matrix stepper = expm(sc.rates.entries().transpose() * grid.dt());
  Vector rho = sc.pi0;
  double quad = 0.0;
  for (int k = 0; k <= grid.steps(); ++k) {
    Matrix expected_q = Matrix::Zero(sc.d(), sc.d());
    for (int i = 0; i < sc.d(); ++i) expected_q += rho[i] * jump_cov[i];
    const double integrand = 0.5 * dual.u.at(k).dot(sc.model.r() * dual.u.at(k)) +
                             0.5 * dual.y.at(k).dot(expected_q * dual.y.at(k));
    quad += (k == 0 || k == grid.steps()) ? 0.5 * integrand : integrand;
    rho = stepper * rho;
  }
  return cost + quad * grid.dt();
}

}  // namespace dualest

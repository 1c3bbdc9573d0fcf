// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Scales: d <= 4, m <= 2, T = 1, dt = 1e-3, 10^4 trials unless stated.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dualest/cost.hpp"
#include "dualest/kalman.hpp"
#include "dualest/numerics.hpp"

using namespace dualest;

namespace {

constexpr int kTrials = 10000;
constexpr double kDt = 1e-3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int index, const std::string& name, const Outcome& outcome) {
  std::printf("[%s] criterion %d (%s): %s\n", outcome.pass ? "PASS" : "FAIL", index, name.c_str(),
              outcome.detail.c_str());
  std::fflush(stdout);
  if (!outcome.pass) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Scenario primary_scenario() {
  Matrix a(3, 3);
  a << -1.0, 0.6, 0.4,
        0.5, -1.2, 0.7,
        0.3, 0.9, -1.2;
  Matrix h(3, 1);
  h << 1.0, 0.0, -0.5;
  Matrix r(1, 1);
  r << 0.5;
  Vector pi0(3);
  pi0 << 0.5, 0.3, 0.2;
  Vector f(3);
  f << 1.0, -0.5, 0.25;
  return Scenario(RateMatrix(a), ObservationModel(h, r), pi0, f,
                  TimeGrid::with_step(1.0, kDt));
}

ControlVariant random_deterministic_variant(const Scenario& sc, std::uint64_t seed,
                                            const std::string& name) {
  Rng rng(seed);
  const int d = sc.d();
  const int m = sc.m();
  Matrix amp(d, m), base(d, m), phase(d, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) {
      amp(i, j) = 0.3 * (2.0 * rng.uniform() - 1.0);
      base(i, j) = 0.2 * (2.0 * rng.uniform() - 1.0);
      phase(i, j) = 6.28 * rng.uniform();
    }
  }
  const double omega = 1.0 + 4.0 * rng.uniform();
  Vector v_amp(m), v_base(m);
  for (int j = 0; j < m; ++j) {
    v_amp[j] = 0.4 * (2.0 * rng.uniform() - 1.0);
    v_base[j] = 0.3 * (2.0 * rng.uniform() - 1.0);
  }
  const double nu = 1.0 + 3.0 * rng.uniform();
  return ControlVariant::deterministic(
      name,
      [=](int, double t) -> Matrix {
        return base + (amp.array() * (phase.array() + omega * t).sin()).matrix();
      },
      [=](int, double t) -> Vector { return v_base + v_amp * std::cos(nu * t); });
}

// ---------------------------------------------------------------------------
// criterion 1: duality identity for five control variants
// ---------------------------------------------------------------------------

ExperimentResult g_variant_run;  // kept for criterion 8's clamp statistics

Outcome criterion_duality_identity() {
  const Scenario sc = primary_scenario();
  Matrix det_gain(3, 1);
  det_gain << 0.2, -0.1, 0.05;
  Vector det_offset(1);
  det_offset << 0.3;
  Vector bump(1);
  bump << 0.4;

  std::vector<ControlVariant> variants;
  variants.push_back(ControlVariant::zero());
  variants.push_back(ControlVariant::deterministic(
      "deterministic", [det_gain](int, double) { return det_gain; },
      [det_offset](int, double) { return det_offset; }));
  variants.push_back(ControlVariant::optimal());
  variants.push_back(ControlVariant::optimal_plus_deterministic(
      "optimal+det_v", [bump](int, double) { return bump; }));
  variants.push_back(
      ControlVariant::optimal_plus_adapted("optimal+adapted_v", make_adapted_offset(1, 0.4, 7u)));

  const auto start = std::chrono::steady_clock::now();
  g_variant_run = cost_monte_carlo(sc, variants, kTrials, 424242u);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double per_variant = seconds / variants.size();

  bool pass = per_variant <= 300.0;
  double worst_ratio = 0.0;
  for (const auto& variant : g_variant_run.variants) {
    const double gap = std::abs(variant.total.mean - variant.mse.mean);
    const double combined =
        std::sqrt(variant.total.se * variant.total.se + variant.mse.se * variant.mse.se);
    const double ratio = gap / (3.0 * combined);
    worst_ratio = std::max(worst_ratio, ratio);
    pass = pass && gap <= 3.0 * combined;
  }
  return {pass, "max |J-MSE| / (3 combined se) = " + fmt(worst_ratio) + " over 5 variants, " +
                    fmt(per_variant) + " s/variant"};
}

// ---------------------------------------------------------------------------
// criterion 2: gain optimality against adapted offset perturbations
// ---------------------------------------------------------------------------

Outcome criterion_gain_optimality() {
  const Scenario sc = primary_scenario();
  std::vector<ControlVariant> variants;
  variants.push_back(ControlVariant::optimal());
  const int perturbations = 10;
  for (int j = 0; j < perturbations; ++j) {
    variants.push_back(ControlVariant::optimal_plus_adapted(
        "perturbed_" + std::to_string(j), make_adapted_offset(1, 0.5, 101u + j)));
  }
  const ExperimentResult result = cost_monte_carlo(sc, variants, kTrials, 515151u);

  const auto& base = result.variants[0];
  bool pass = true;
  double min_z = 1e300;
  for (int j = 1; j <= perturbations; ++j) {
    std::vector<double> diff;
    for (std::size_t i = 0; i < base.trials.size(); ++i) {
      if (base.trials[i].excluded || result.variants[j].trials[i].excluded) continue;
      diff.push_back(result.variants[j].trials[i].cost.total - base.trials[i].cost.total);
    }
    const SummaryStat stat = summarize(diff);
    const double z = stat.mean / stat.se;
    min_z = std::min(min_z, z);
    pass = pass && stat.mean > 0.0 && z > 3.0;
  }
  return {pass, "min paired z-score = " + fmt(min_z) + " over 10 adapted perturbations"};
}

// ---------------------------------------------------------------------------
// criterion 3 (+ structural material for criterion 8)
// ---------------------------------------------------------------------------

struct RecoveryStats {
  double max_path_gap = 0.0;          // |S_T - f.pi_T| over the first 100 seeds
  double mse_mean = 0.0, mse_se = 0.0;
  double oracle_mse_mean = 0.0, oracle_mse_se = 0.0;
  bool terminal_exact = true;
  double worst_reconstruction = 0.0;
  bool simplex_ok = true;
};

RecoveryStats g_recovery;

Outcome criterion_wonham_recovery() {
  const Scenario sc = primary_scenario();
  const TimeGrid& grid = sc.grid;
  const double tol = 10.0 * std::sqrt(grid.dt());

  std::vector<double> mse, oracle_mse;
  mse.reserve(kTrials);
  oracle_mse.reserve(kTrials);
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(derive_seed(636363u, trial));
    const JumpPath x = simulate_ctmc(sc.rates, sc.pi0, grid.horizon(), rng);
    const ObservationRecord obs = simulate_observation(x, sc.model, grid, rng);
    const FilterResult filter = run_wonham(obs.z, sc.pi0, sc.rates, sc.model);

    ControlSchedule ctrl(grid, sc.d(), sc.m());
    ctrl.gain = filter.gain;
    const DualPath dual = solve_backward(sc.rates, sc.model, ctrl, sc.f, grid);
    const DualDecomposition decomp = decompose(dual, ctrl, sc.rates, sc.model);
    const double s_t = estimator(dual.y.at(0), sc.pi0, decomp, obs.z);

    const double target = sc.f.dot(state_vector(x, grid.horizon()));
    const double gap_a = s_t - target;
    mse.push_back(0.5 * gap_a * gap_a);
    const VectorPath reference = bayes_oracle(obs.z, sc.pi0, sc.rates, sc.model);
    const double gap_b = sc.f.dot(reference.at(grid.steps())) - target;
    oracle_mse.push_back(0.5 * gap_b * gap_b);

    if (trial < 100) {
      const double path_gap = std::abs(s_t - sc.f.dot(filter.pi.at(grid.steps())));
      g_recovery.max_path_gap = std::max(g_recovery.max_path_gap, path_gap);

      for (int i = 0; i < sc.d(); ++i) {
        g_recovery.terminal_exact =
            g_recovery.terminal_exact && dual.y.at(grid.steps())[i] == sc.f[i];
      }
      for (int k = 0; k <= grid.steps(); k += 10) {
        const Vector y_rec = decomp.phi.at(k) * dual.y.at(0) + decomp.eta.at(k);
        g_recovery.worst_reconstruction =
            std::max(g_recovery.worst_reconstruction,
                     (y_rec - dual.y.at(k)).norm() / (1.0 + dual.y.at(k).norm()));
        try {
          validate_simplex(filter.pi.at(k), 1e-9);
        } catch (const std::exception&) {
          g_recovery.simplex_ok = false;
        }
      }
    }
  }

  const SummaryStat stat_a = summarize(mse);
  const SummaryStat stat_b = summarize(oracle_mse);
  g_recovery.mse_mean = stat_a.mean;
  g_recovery.mse_se = stat_a.se;
  g_recovery.oracle_mse_mean = stat_b.mean;
  g_recovery.oracle_mse_se = stat_b.se;

  const double combined = std::sqrt(stat_a.se * stat_a.se + stat_b.se * stat_b.se);
  const double mean_gap = std::abs(stat_a.mean - stat_b.mean);
  const bool pass = g_recovery.max_path_gap <= tol && mean_gap <= 3.0 * combined;
  return {pass, "max |S_T - f.pi_T| = " + fmt(g_recovery.max_path_gap) + " (tol " + fmt(tol) +
                    "), |MSE - oracle MSE| / (3 se) = " + fmt(mean_gap / (3.0 * combined))};
}

// ---------------------------------------------------------------------------
// criterion 4: first-order agreement of filter and reference
// ---------------------------------------------------------------------------

Outcome criterion_oracle_consistency() {
  Matrix a(2, 2);
  a << -3.0, 3.0, 3.0, -3.0;
  Matrix h(2, 1);
  h << 0.25, 0.0;
  Vector pi0(2);
  pi0 << 0.5, 0.5;
  const std::vector<double> gaps =
      filter_gap_study(RateMatrix(a), ObservationModel(h, Matrix::Identity(1, 1)), pi0, 1.0,
                       {1e-3, 5e-4}, 100, 97531u);
  const double ratio = gaps[0] / gaps[1];
  return {ratio >= 1.8, "mean sup gap ratio (dt -> dt/2) = " + fmt(ratio) + " (need >= 1.8)"};
}

// ---------------------------------------------------------------------------
// criterion 5: classical Kalman-Bucy duality
// ---------------------------------------------------------------------------

Matrix testing_spd(Rng& rng, int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  return g * g.transpose() + 0.25 * Matrix::Identity(n, n);
}

Outcome criterion_kalman_duality() {
  const TimeGrid grid(1.0, 10000);  // dt = 1e-4

  // Scalar model with a closed-form covariance.
  const double sigma0 = 0.8, r = 0.5;
  const LinearModel scalar(Matrix::Zero(1, 1), Matrix::Identity(1, 1),
                           Matrix::Zero(1, 1), Matrix::Constant(1, 1, r), Vector::Zero(1),
                           Matrix::Constant(1, 1, sigma0));
  const MatrixPath sigma_scalar = covariance_riccati(scalar, grid);
  double closed_form_err = 0.0;
  for (int k = 0; k <= grid.steps(); k += 100) {
    const double expected = sigma0 * r / (r + sigma0 * grid.time(k));
    closed_form_err = std::max(closed_form_err, std::abs(sigma_scalar.at(k)(0, 0) - expected));
  }

  Rng rng(272727u);
  const auto random_model = [&](int d, int m) {
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = rng.normal() * 0.6;
    Matrix h(d, m);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < m; ++j) h(i, j) = rng.normal();
    Vector x0(d);
    for (int i = 0; i < d; ++i) x0[i] = 0.5 * rng.normal();
    return LinearModel(a, h, testing_spd(rng, d), testing_spd(rng, m), x0, testing_spd(rng, d));
  };

  double max_gap = std::max(duality_check(scalar, grid).max_gap, 0.0);
  const LinearModel model2 = random_model(2, 1);
  const LinearModel model3 = random_model(3, 2);
  max_gap = std::max(max_gap, duality_check(model2, grid).max_gap);
  max_gap = std::max(max_gap, duality_check(model3, grid).max_gap);

  double cost_gap = 0.0;
  {
    Vector f1 = Vector::Ones(1);
    const double cost = dual_lq_solve(scalar, f1, grid).cost;
    const double predicted = 0.5 * f1.dot(sigma_scalar.at(grid.steps()) * f1);
    cost_gap = std::max(cost_gap, std::abs(cost - predicted));
  }
  {
    Vector f3(3);
    f3 << 1.0, -0.5, 0.25;
    const MatrixPath sigma3 = covariance_riccati(model3, grid);
    const double cost = dual_lq_solve(model3, f3, grid).cost;
    const double predicted = 0.5 * f3.dot(sigma3.at(grid.steps()) * f3);
    cost_gap = std::max(cost_gap, std::abs(cost - predicted));
  }

  const bool pass = max_gap <= 1e-5 && cost_gap <= 1e-6 && closed_form_err <= 1e-6;
  return {pass, "max riccati gap = " + fmt(max_gap) + " (tol 1e-5), cost gap = " + fmt(cost_gap) +
                    " (tol 1e-6), scalar closed form err = " + fmt(closed_form_err)};
}

// ---------------------------------------------------------------------------
// criterion 6: deterministic-control reduction
// ---------------------------------------------------------------------------

Outcome criterion_deterministic_reduction() {
  const Scenario sc = primary_scenario();
  std::vector<ControlVariant> variants;
  std::vector<double> closed_forms;
  for (int j = 0; j < 5; ++j) {
    const ControlVariant variant =
        random_deterministic_variant(sc, 900u + j, "det_" + std::to_string(j));
    closed_forms.push_back(deterministic_cost(sc, variant.det_gain, variant.det_offset));
    variants.push_back(variant);
  }
  const ExperimentResult result = cost_monte_carlo(sc, variants, kTrials, 737373u);

  bool pass = true;
  double worst = 0.0;
  double worst_mart = 0.0;
  for (int j = 0; j < 5; ++j) {
    const auto& variant = result.variants[j];
    const double gap = std::abs(variant.total.mean - closed_forms[j]);
    pass = pass && gap <= 3.0 * variant.total.se;
    worst = std::max(worst, gap / (3.0 * variant.total.se));
    const double mart_ratio = std::abs(variant.martingale_term.mean) /
                              (3.0 * variant.martingale_term.se);
    pass = pass && mart_ratio <= 1.0;
    worst_mart = std::max(worst_mart, mart_ratio);
  }
  return {pass, "max |J_mc - J_det| / (3 se) = " + fmt(worst) +
                    ", max |martingale mean| / (3 se) = " + fmt(worst_mart) + " over 5 draws"};
}

// ---------------------------------------------------------------------------
// criterion 7: grid-level stochastic calculus
// ---------------------------------------------------------------------------

Outcome criterion_forward_calculus() {
  const int steps = 1000;
  const double dt = 1.0 / steps;
  const double tol = 10.0 * std::sqrt(dt);

  double max_ito_gap = 0.0;
  double sum = 0.0, sum_sq = 0.0;
  const double c = 0.8;
  for (int s = 0; s < kTrials; ++s) {
    Rng rng(derive_seed(848484u, s));
    RowVector w = RowVector::Zero(steps + 1);
    for (int k = 0; k < steps; ++k) w[k + 1] = w[k] + std::sqrt(dt) * rng.normal();
    const SplitProcess wp = SplitProcess::adapted(w);
    const double ito = forward_integral(wp, wp);
    max_ito_gap = std::max(max_ito_gap, std::abs(ito - 0.5 * (w[steps] * w[steps] - 1.0)));

    const double weighted = forward_integral(
        SplitProcess::adapted(RowVector::Constant(steps + 1, c)), wp);
    sum += weighted;
    sum_sq += weighted * weighted;
  }
  const double mean = sum / kTrials;
  const double var = sum_sq / kTrials - mean * mean;
  const double isometry_err = std::abs(var - c * c) / (c * c);

  // Product formula for split processes sharing one driving path.
  double max_residual = 0.0;
  for (int s = 0; s < 100; ++s) {
    Rng rng(derive_seed(959595u, s));
    RowVector w = RowVector::Zero(steps + 1);
    for (int k = 0; k < steps; ++k) w[k + 1] = w[k] + std::sqrt(dt) * rng.normal();
    SplitProcess phi, psi;
    phi.factor = Vector::Constant(1, rng.normal());
    phi.adapted_vec = Matrix(1, steps + 1);
    phi.adapted_scalar = RowVector(steps + 1);
    psi.factor = Vector::Constant(1, rng.normal());
    psi.adapted_vec = Matrix(1, steps + 1);
    psi.adapted_scalar = RowVector(steps + 1);
    for (int k = 0; k <= steps; ++k) {
      const double t = k * dt;
      phi.adapted_vec(0, k) = w[k];
      phi.adapted_scalar[k] = std::sin(t) + 0.3 * w[k];
      psi.adapted_vec(0, k) = 0.5 * w[k] - 0.2 * t;
      psi.adapted_scalar[k] = 0.1 * w[k] * w[k];
    }
    const RowVector phi_dpsi = forward_integral_path(phi, psi);
    const RowVector psi_dphi = forward_integral_path(psi, phi);
    double covar = 0.0;
    for (int k = 0; k < steps; ++k) {
      covar += (phi.value(k + 1) - phi.value(k)) * (psi.value(k + 1) - psi.value(k));
      const double lhs = phi.value(k + 1) * psi.value(k + 1) - phi.value(0) * psi.value(0);
      max_residual = std::max(
          max_residual, std::abs(lhs - (phi_dpsi[k + 1] + psi_dphi[k + 1] + covar)));
    }
  }

  const bool pass = max_ito_gap <= tol && isometry_err <= 0.05 && max_residual <= tol;
  return {pass, "max |int W dW - closed form| = " + fmt(max_ito_gap) + " (tol " + fmt(tol) +
                    "), isometry err = " + fmt(isometry_err) +
                    ", product residual = " + fmt(max_residual)};
}

// ---------------------------------------------------------------------------
// criterion 8: structural invariants
// ---------------------------------------------------------------------------

Outcome criterion_structural_invariants() {
  // Clamp rate from the criterion-1 run (optimal variant).
  double clamp_rate = 1.0;
  for (const auto& variant : g_variant_run.variants) {
    if (variant.filter_steps > 0) {
      clamp_rate = static_cast<double>(variant.clamp_steps) / variant.filter_steps;
      break;
    }
  }

  const Scenario sc = primary_scenario();
  const ExperimentResult a = cost_monte_carlo(sc, {ControlVariant::optimal()}, 200, 11111u);
  const ExperimentResult b = cost_monte_carlo(sc, {ControlVariant::optimal()}, 200, 11111u);
  bool identical = true;
  for (std::size_t i = 0; i < a.variants[0].trials.size(); ++i) {
    const auto& ra = a.variants[0].trials[i];
    const auto& rb = b.variants[0].trials[i];
    identical = identical && ra.cost.total == rb.cost.total && ra.estimate == rb.estimate &&
                ra.cost.martingale_term == rb.cost.martingale_term;
  }

  const bool pass = g_recovery.simplex_ok && clamp_rate < 0.01 && g_recovery.terminal_exact &&
                    g_recovery.worst_reconstruction <= 1e-8 && identical;
  return {pass, "clamp rate = " + fmt(clamp_rate) + ", terminal exact = " +
                    (g_recovery.terminal_exact ? "yes" : "no") + ", reconstruction = " +
                    fmt(g_recovery.worst_reconstruction) + ", rerun identical = " +
                    (identical ? "yes" : "no")};
}

}  // namespace

int main() {
  report(1, "duality identity", criterion_duality_identity());
  report(2, "gain optimality", criterion_gain_optimality());
  report(3, "wonham recovery", criterion_wonham_recovery());
  report(4, "oracle consistency", criterion_oracle_consistency());
  report(5, "kalman-bucy duality", criterion_kalman_duality());
  report(6, "deterministic reduction", criterion_deterministic_reduction());
  report(7, "forward calculus", criterion_forward_calculus());
  report(8, "structural invariants", criterion_structural_invariants());
  return failures;
}

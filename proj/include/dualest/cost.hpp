#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dualest/dual.hpp"
#include "dualest/wonham.hpp"

namespace dualest {

/// The four additive pieces of the realized dual objective for one trial.
struct CostBreakdown {
  double initial_term = 0.0;              // 0.5 |y0.(X0 - pi0)|^2
  double control_energy = 0.0;            // trapezoid of 0.5 U.R U
  double quadratic_variation_term = 0.0;  // 0.5 sum over jumps of (Y.(e_to - e_from))^2
  double martingale_term = 0.0;           // left sums of e dU.W and e dY.B
  double total = 0.0;                     // sum of the four, assigned exactly
};

/// Finite-state experiment setup shared by all control variants.
struct Scenario {
  RateMatrix rates;
  ObservationModel model;
  Vector pi0;
  Vector f;
  TimeGrid grid;

  Scenario(RateMatrix rates, ObservationModel model, Vector pi0, Vector f, TimeGrid grid);
  int d() const { return rates.dim(); }
  int m() const { return model.obs_dim(); }
};

/// Schedule generators; deterministic parts depend on (node, time) only, the
/// adapted offset additionally sees the observation value at that node.
using DetGainFn = std::function<Matrix(int k, double t)>;
using DetOffsetFn = std::function<Vector(int k, double t)>;
using AdaptedOffsetFn = std::function<Vector(int k, double t, const Vector& z_t)>;

struct ControlVariant {
  std::string name;
  bool use_filter_gain = false;  // gain from the filter run (observation-adapted)
  DetGainFn det_gain;            // otherwise: deterministic gain (null = zero)
  DetOffsetFn det_offset;        // deterministic offset (null = zero)
  AdaptedOffsetFn adapted_offset;  // offset built from Z (null = none)

  bool offset_is_zero() const { return !det_offset && !adapted_offset; }
  bool dual_is_deterministic() const { return !use_filter_gain && !adapted_offset; }

  static ControlVariant zero();
  static ControlVariant deterministic(std::string name, DetGainFn gain, DetOffsetFn offset);
  static ControlVariant optimal();
  static ControlVariant optimal_plus_deterministic(std::string name, DetOffsetFn offset);
  static ControlVariant optimal_plus_adapted(std::string name, AdaptedOffsetFn offset);
};

struct TrialRecord {
  int trial = 0;
  bool excluded = false;  // filter blow-up on this trial
  CostBreakdown cost;
  double estimate = 0.0;  // S_T
  double target = 0.0;    // f . X_T
  double mse = 0.0;       // 0.5 (S_T - f.X_T)^2
};

struct SummaryStat {
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
};

struct VariantResult {
  std::string name;
  std::vector<TrialRecord> trials;
  int excluded = 0;
  long clamp_steps = 0;   // filter projection activations over all trials
  long filter_steps = 0;  // total filter steps, for the clamp rate
  SummaryStat initial_term, control_energy, quadratic_variation_term, martingale_term;
  SummaryStat total, mse;
};

struct ExperimentResult {
  std::vector<VariantResult> variants;
};

/// Monte Carlo estimate of the dual objective and of the squared estimation
/// error for each control variant. All variants of a trial share the same
/// signal/noise draw (common random numbers); trial seeds derive from
/// (master seed, trial index) so results do not depend on evaluation order.
/// Filter blow-ups exclude the trial for filter-based variants only, and the
/// count is surfaced in the result.
ExperimentResult cost_monte_carlo(const Scenario& scenario,
                                  const std::vector<ControlVariant>& variants, int trials,
                                  std::uint64_t seed);

/// Closed-form objective for a deterministic control: the initial-covariance
/// term plus the quadrature of the control energy and of Y . E[Q(X_t)] Y with
/// the state distribution stepped exactly through the matrix exponential.
double deterministic_cost(const Scenario& scenario, const DetGainFn& gain,
                          const DetOffsetFn& offset);

/// Helper shared by the statistics: mean and standard error accumulated in
/// trial order.
SummaryStat summarize(const std::vector<double>& values);

/// Observation-adapted offset with randomized coefficients: at each node the
/// value depends on the current time and observation only,
///   V(t, z) = scale * (c0 + C1 z + c2 sin(omega t + a . z)).
AdaptedOffsetFn make_adapted_offset(int m, double scale, std::uint64_t seed);

/// Options for building the named control variants used by the batch front
/// ends (constant deterministic schedules, offset flavor for optimal+v).
struct VariantOptions {
  Matrix det_gain;    // empty = zero
  Vector det_offset;  // empty = zero (constant offset_scale for optimal+v)
  std::string offset_kind = "adapted";  // adapted | constant
  double offset_scale = 0.4;
  std::uint64_t offset_seed = 1;
};

/// Variant by name: zero | deterministic | optimal | optimal+v.
ControlVariant variant_from_name(const std::string& name, int d, int m,
                                 const VariantOptions& options);

/// Mean over seeds of sup_t |filter - reference|_1 at each step size. The
/// signal path and the noise increments are drawn once per seed on the finest
/// grid and the cumulative observation path is subsampled, so every resolution
/// conditions on the same draw. Step sizes must be integer multiples of the
/// smallest one.
std::vector<double> filter_gap_study(const RateMatrix& rates, const ObservationModel& model,
                                     const Vector& pi0, double horizon,
                                     const std::vector<double>& dts, int seeds,
                                     std::uint64_t seed);

}  // namespace dualest

#pragma once

#include <stdexcept>

#include "dualest/ctmc.hpp"
#include "dualest/observation.hpp"

namespace dualest {

/// Raised when an Euler filter step collapses (clamped mass below 1e-12).
/// Reported to the caller rather than patched over.
class FilterBlowupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conditional covariance of a point on the simplex: diag(pi) - pi pi^T.
Matrix conditional_covariance(const Vector& pi);

/// Filter gain -(diag(pi) - pi pi^T) H R^{-1}  (d x m).
Matrix optimal_gain(const Vector& pi, const ObservationModel& model);

/// One Euler-Maruyama step of the conditional-distribution equation followed by
/// the simplex projection (clamp negatives, renormalize). `clamped`, when
/// given, is set if the projection had to remove negative mass.
Vector wonham_step(const Vector& pi, const Vector& dz, double dt, const RateMatrix& a,
                   const ObservationModel& model, bool* clamped = nullptr);

struct FilterResult {
  VectorPath pi;       // conditional distribution per node
  MatrixPath gain;     // d x m gain per node, computed from pi at the same node
  int clamp_count = 0; // steps on which the simplex projection removed mass
};

/// Run the filter along an observation path. The recorded gain at node k is a
/// function of observations up to t_k only.
FilterResult run_wonham(const VectorPath& z, const Vector& pi0, const RateMatrix& a,
                        const ObservationModel& model);

/// Independent reference: the exact posterior of the time-discretized model.
/// Predict with the matrix exponential, correct each state by the Gaussian
/// density of the observed increment, renormalize.
VectorPath bayes_oracle(const VectorPath& z, const Vector& pi0, const RateMatrix& a,
                        const ObservationModel& model);

}  // namespace dualest

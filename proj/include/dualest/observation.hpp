#pragma once

#include <cstdint>

#include "dualest/ctmc.hpp"
#include "dualest/grid.hpp"
#include "dualest/rng.hpp"

namespace dualest {

/// Observation map H (d x m, row i is the read-out of state i) and noise
/// covariance R (m x m, symmetric positive definite).
class ObservationModel {
 public:
  ObservationModel(Matrix h, Matrix r);

  int signal_dim() const { return static_cast<int>(h_.rows()); }
  int obs_dim() const { return static_cast<int>(h_.cols()); }
  const Matrix& h() const { return h_; }
  const Matrix& r() const { return r_; }
  const Matrix& r_inverse() const { return r_inv_; }
  /// Symmetric PSD square root of R, used to color the noise increments.
  const Matrix& noise_factor() const { return r_sqrt_; }

 private:
  Matrix h_, r_, r_inv_, r_sqrt_;
};

struct ObservationRecord {
  VectorPath z;
  VectorPath w;
};

/// Observation path Z and its driving noise W on the grid. Noise increments
/// are N(0, R dt); the drift increment over each cell is the exact occupation
/// integral H^T * (time in each state), so no left-endpoint bias enters.
/// Z_0 = W_0 = 0. The stream is consumed as m normals per grid cell, in
/// component order.
ObservationRecord simulate_observation(const JumpPath& path, const ObservationModel& model,
                                       const TimeGrid& grid, Rng& rng);
ObservationRecord simulate_observation(const JumpPath& path, const ObservationModel& model,
                                       const TimeGrid& grid, std::uint64_t seed);

}  // namespace dualest

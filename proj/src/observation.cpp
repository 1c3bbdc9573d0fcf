#include "dualest/observation.hpp"

#include <cmath>

#include "dualest/numerics.hpp"

namespace dualest {

ObservationModel::ObservationModel(Matrix h, Matrix r) : h_(std::move(h)), r_(std::move(r)) {
  if (r_.rows() != r_.cols() || r_.rows() != h_.cols()) {
    throw std::invalid_argument("ObservationModel: R must be m x m with m = cols(H)");
  }
  if (!r_.isApprox(r_.transpose(), 1e-12)) {
    throw std::invalid_argument("ObservationModel: R must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(r_);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("ObservationModel: R must be positive definite");
  }
  r_inv_ = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
  r_sqrt_ = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
            eig.eigenvectors().transpose();
}

ObservationRecord simulate_observation(const JumpPath& path, const ObservationModel& model,
                                       const TimeGrid& grid, Rng& rng) {
  if (path.dim != model.signal_dim()) {
    throw std::invalid_argument("simulate_observation: path/model dimension mismatch");
  }
  if (std::abs(path.horizon - grid.horizon()) > 1e-12) {
    throw std::invalid_argument("simulate_observation: grid horizon does not match path horizon");
  }
  const int m = model.obs_dim();
  const double sqrt_dt = std::sqrt(grid.dt());

  ObservationRecord rec{VectorPath(grid, m), VectorPath(grid, m)};
  Vector z = Vector::Zero(m);
  Vector w = Vector::Zero(m);
  for (int k = 0; k < grid.steps(); ++k) {
    const Vector dw = model.noise_factor() * (sqrt_dt * rng.normal_vector(m));
    const Vector drift = model.h().transpose() * path.occupation(grid.time(k), grid.time(k + 1));
    w += dw;
    z += drift + dw;
    rec.w.at(k + 1) = w;
    rec.z.at(k + 1) = z;
  }
  return rec;
}

ObservationRecord simulate_observation(const JumpPath& path, const ObservationModel& model,
                                       const TimeGrid& grid, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_observation(path, model, grid, rng);
}

}  // namespace dualest

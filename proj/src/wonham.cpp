#include "dualest/wonham.hpp"

#include <cmath>

#include "dualest/numerics.hpp"

namespace dualest {

Matrix conditional_covariance(const Vector& pi) {
  Matrix cov = Matrix(pi.asDiagonal());
  cov.noalias() -= pi * pi.transpose();
  return cov;
}

Matrix optimal_gain(const Vector& pi, const ObservationModel& model) {
  return -conditional_covariance(pi) * model.h() * model.r_inverse();
}

Vector wonham_step(const Vector& pi, const Vector& dz, double dt, const RateMatrix& a,
                   const ObservationModel& model, bool* clamped) {
  const Vector innovation = dz - model.h().transpose() * pi * dt;
  Vector next = pi + a.entries().transpose() * pi * dt +
                conditional_covariance(pi) * (model.h() * (model.r_inverse() * innovation));

  const bool needs_clamp = next.minCoeff() < 0.0;
  if (clamped) *clamped = needs_clamp;
  if (needs_clamp) next = next.cwiseMax(0.0);
  const double mass = next.sum();
  if (!next.allFinite() || !(mass > 1e-12)) {
    throw FilterBlowupError("wonham_step: filter mass collapsed; step size too coarse");
  }
  return next / mass;
}

FilterResult run_wonham(const VectorPath& z, const Vector& pi0, const RateMatrix& a,
                        const ObservationModel& model) {
  validate_simplex(pi0);
  const TimeGrid& grid = z.grid;
  const double dt = grid.dt();

  FilterResult result{VectorPath(grid, a.dim()), MatrixPath(grid, a.dim(), model.obs_dim()), 0};
  Vector pi = pi0;
  result.pi.at(0) = pi;
  result.gain.at(0) = optimal_gain(pi, model);
  for (int k = 0; k < grid.steps(); ++k) {
    bool clamped = false;
    pi = wonham_step(pi, z.at(k + 1) - z.at(k), dt, a, model, &clamped);
    if (clamped) ++result.clamp_count;
    result.pi.at(k + 1) = pi;
    result.gain.at(k + 1) = optimal_gain(pi, model);
  }
  return result;
}

VectorPath bayes_oracle(const VectorPath& z, const Vector& pi0, const RateMatrix& a,
                        const ObservationModel& model) {
  validate_simplex(pi0);
  const TimeGrid& grid = z.grid;
  const double dt = grid.dt();
  const int d = a.dim();

  const Matrix predictor = expm(a.entries().transpose() * dt);
  const Matrix precision = model.r_inverse() / dt;  // inverse of R*dt

  VectorPath posterior(grid, d);
  Vector p = pi0;
  posterior.at(0) = p;
  Vector log_lik(d);
  for (int k = 0; k < grid.steps(); ++k) {
    p = predictor * p;
    const Vector dz = z.at(k + 1) - z.at(k);
    for (int i = 0; i < d; ++i) {
      const Vector residual = dz - model.h().row(i).transpose() * dt;
      log_lik[i] = -0.5 * residual.dot(precision * residual);
    }
    p = p.cwiseProduct((log_lik.array() - log_lik.maxCoeff()).exp().matrix());
    p /= p.sum();
    posterior.at(k + 1) = p;
  }
  return posterior;
}

}  // namespace dualest

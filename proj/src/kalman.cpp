#include "dualest/kalman.hpp"

#include <cmath>

#include "dualest/numerics.hpp"
#include "dualest/rng.hpp"

namespace dualest {

namespace {

void require_symmetric_psd(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || !m.isApprox(m.transpose(), 1e-10)) {
    throw std::invalid_argument(std::string(what) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument(std::string(what) + " must be positive semidefinite");
  }
}

}  // namespace

LinearModel::LinearModel(Matrix a, Matrix h, Matrix q, Matrix r, Vector x0_mean, Matrix sigma0)
    : a_(std::move(a)), h_(std::move(h)), q_(std::move(q)), r_(std::move(r)),
      x0_mean_(std::move(x0_mean)), sigma0_(std::move(sigma0)) {
  const auto d = a_.rows();
  if (a_.cols() != d) throw std::invalid_argument("LinearModel: A must be square");
  if (h_.rows() != d) throw std::invalid_argument("LinearModel: H must have d rows");
  if (x0_mean_.size() != d) throw std::invalid_argument("LinearModel: x0 mean dimension mismatch");
  if (q_.rows() != d) throw std::invalid_argument("LinearModel: Q dimension mismatch");
  if (sigma0_.rows() != d) throw std::invalid_argument("LinearModel: Sigma0 dimension mismatch");
  require_symmetric_psd(q_, "LinearModel: Q");
  require_symmetric_psd(sigma0_, "LinearModel: Sigma0");
  if (r_.rows() != r_.cols() || r_.rows() != h_.cols() || !r_.isApprox(r_.transpose(), 1e-10)) {
    throw std::invalid_argument("LinearModel: R must be symmetric m x m");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(r_);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("LinearModel: R must be positive definite");
  }
  r_inv_ = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
  r_sqrt_ = symmetric_sqrt(r_);
  q_sqrt_ = symmetric_sqrt(q_);
  sigma0_sqrt_ = symmetric_sqrt(sigma0_);
}

namespace {

Matrix riccati_rhs(const LinearModel& model, const Matrix& s) {
  return model.a().transpose() * s + s * model.a() + model.q() -
         s * model.h() * model.r_inverse() * model.h().transpose() * s;
}

}  // namespace

MatrixPath covariance_riccati(const LinearModel& model, const TimeGrid& grid) {
  const int d = model.signal_dim();
  MatrixPath out(grid, d, d);
  Matrix s = model.sigma0();
  out.at(0) = s;
  for (int k = 0; k < grid.steps(); ++k) {
    s = rk4_step(s, grid.dt(), [&](const Matrix& v) { return riccati_rhs(model, v); });
    s = 0.5 * (s + s.transpose());
    out.at(k + 1) = s;
  }
  return out;
}

MatrixPath control_riccati(const LinearModel& model, const TimeGrid& grid) {
  const int d = model.signal_dim();
  MatrixPath out(grid, d, d);
  Matrix p = model.sigma0();
  out.at(grid.steps()) = p;
  for (int k = grid.steps() - 1; k >= 0; --k) {
    p = rk4_step(p, -grid.dt(), [&](const Matrix& v) -> Matrix { return -riccati_rhs(model, v); });
    p = 0.5 * (p + p.transpose());
    out.at(k) = p;
  }
  return out;
}

KalmanResult kalman_bucy(const LinearModel& model, const VectorPath& z, const TimeGrid& grid) {
  require_same_grid(z.grid, grid, "kalman_bucy");
  const int d = model.signal_dim();
  const double dt = grid.dt();

  KalmanResult result{VectorPath(grid, d), covariance_riccati(model, grid)};
  Vector mean = model.x0_mean();
  result.mean.at(0) = mean;
  for (int k = 0; k < grid.steps(); ++k) {
    const Vector innovation = (z.at(k + 1) - z.at(k)) - model.h().transpose() * mean * dt;
    mean += model.a().transpose() * mean * dt +
            result.covariance.at(k) * model.h() * (model.r_inverse() * innovation);
    result.mean.at(k + 1) = mean;
  }
  return result;
}

DualLqResult dual_lq_solve(const LinearModel& model, const Vector& f, const TimeGrid& grid) {
  const int d = model.signal_dim();
  const int m = model.obs_dim();
  if (f.size() != d) throw std::invalid_argument("dual_lq_solve: terminal vector dimension mismatch");

  const MatrixPath p = control_riccati(model, grid);
  const int n = grid.steps();

  // Closed-loop coefficient -A + H R^{-1} H^T P(T - t); the Riccati value is
  // stage-matched (nodes at the cell edges, averaged at the half step) so the
  // step stays better than second order.
  const auto coeff_at = [&](const Matrix& riccati) -> Matrix {
    return -model.a() + model.h() * (model.r_inverse() * model.h().transpose() * riccati);
  };

  DualLqResult result{VectorPath(grid, d), VectorPath(grid, m), 0.0};
  Vector y = f;
  result.y.at(n) = y;
  const double h = -grid.dt();
  for (int k = n - 1; k >= 0; --k) {
    const Matrix edge_right = coeff_at(p.at(n - k - 1));  // value at t_{k+1}
    const Matrix edge_left = coeff_at(p.at(n - k));       // value at t_k
    const Matrix mid = 0.5 * (edge_right + edge_left);
    const Vector k1 = edge_right * y;
    const Vector k2 = mid * (y + (0.5 * h) * k1);
    const Vector k3 = mid * (y + (0.5 * h) * k2);
    const Vector k4 = edge_left * (y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    result.y.at(k) = y;
  }
  for (int k = 0; k <= n; ++k) {
    result.u.at(k) = -model.r_inverse() * model.h().transpose() * p.at(n - k) * result.y.at(k);
  }
  result.cost = linear_cost(model, result.u, result.y);
  return result;
}

DualityReport duality_check(const LinearModel& model, const TimeGrid& grid) {
  const MatrixPath sigma = covariance_riccati(model, grid);
  const MatrixPath p = control_riccati(model, grid);
  DualityReport report{0.0, std::max(1e-9, 0.1 * grid.dt()), false, ScalarPath(grid)};
  for (int k = 0; k <= grid.steps(); ++k) {
    const double gap = (p.at(grid.steps() - k) - sigma.at(k)).norm();
    report.gap.values[k] = gap;
    report.max_gap = std::max(report.max_gap, gap);
  }
  report.pass = report.max_gap <= report.tolerance;
  return report;
}

VectorPath solve_linear_dual(const LinearModel& model, const VectorPath& u, const Vector& f) {
  const TimeGrid& grid = u.grid;
  VectorPath y(grid, model.signal_dim());
  Vector state = f;
  y.at(grid.steps()) = state;
  for (int k = grid.steps() - 1; k >= 0; --k) {
    const Vector constant = -model.h() * u.at(k);
    state = rk4_step(state, -grid.dt(), [&](const Vector& v) -> Vector {
      return -model.a() * v + constant;
    });
    y.at(k) = state;
  }
  return y;
}

double linear_cost(const LinearModel& model, const VectorPath& u, const VectorPath& y) {
  const TimeGrid& grid = u.grid;
  double quad = 0.0;
  for (int k = 0; k <= grid.steps(); ++k) {
    const double integrand = 0.5 * u.at(k).dot(model.r() * u.at(k)) +
                             0.5 * y.at(k).dot(model.q() * y.at(k));
    quad += (k == 0 || k == grid.steps()) ? 0.5 * integrand : integrand;
  }
  return 0.5 * y.at(0).dot(model.sigma0() * y.at(0)) + quad * grid.dt();
}

std::vector<double> linear_squared_errors(const LinearModel& model, const Vector& f,
                                          const VectorPath& u, const VectorPath& y, int trials,
                                          std::uint64_t seed) {
  const TimeGrid& grid = u.grid;
  const int d = model.signal_dim();
  const int m = model.obs_dim();
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const double base = y.at(0).dot(model.x0_mean());

  std::vector<double> errors;
  errors.reserve(trials);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    Vector x = model.x0_mean() + model.sigma0_factor() * rng.normal_vector(d);
    double correction = 0.0;
    for (int k = 0; k < grid.steps(); ++k) {
      const Vector db = model.q_factor() * (sqrt_dt * rng.normal_vector(d));
      const Vector dw = model.r_factor() * (sqrt_dt * rng.normal_vector(m));
      const Vector dz = model.h().transpose() * x * dt + dw;
      correction += u.at(k).dot(dz);
      x += model.a().transpose() * x * dt + db;
    }
    const double err = (base - correction) - f.dot(x);
    errors.push_back(err * err);
  }
  return errors;
}

LinearMseStats linear_mse_for_control(const LinearModel& model, const Vector& f,
                                      const VectorPath& u, const VectorPath& y, int trials,
                                      std::uint64_t seed) {
  const std::vector<double> errors = linear_squared_errors(model, f, u, y, trials, seed);
  double sum = 0.0, sum_sq = 0.0;
  for (double e : errors) {
    sum += e;
    sum_sq += e * e;
  }
  LinearMseStats stats;
  stats.trials = trials;
  stats.mse = sum / trials;
  const double var = (sum_sq - trials * stats.mse * stats.mse) / (trials - 1);
  stats.se = std::sqrt(std::max(var, 0.0) / trials);
  return stats;
}

LinearMseResult linear_estimator_mse(const LinearModel& model, const Vector& f,
                                     const TimeGrid& grid, int trials, std::uint64_t seed) {
  const DualLqResult lq = dual_lq_solve(model, f, grid);
  const MatrixPath sigma = covariance_riccati(model, grid);
  LinearMseResult result;
  result.stats = linear_mse_for_control(model, f, lq.u, lq.y, trials, seed);
  result.optimal_cost = lq.cost;
  result.predicted_mse = f.dot(sigma.at(grid.steps()) * f);
  return result;
}

}  // namespace dualest

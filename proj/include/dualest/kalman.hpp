#pragma once

#include <cstdint>

#include "dualest/grid.hpp"

namespace dualest {

/// Linear-Gaussian filtering model with the same transposition convention as
/// the finite-state signal: dX = A^T X dt + dB, dZ = H^T X dt + dW, with
/// cov(B) = Q, cov(W) = R, X_0 ~ N(x0_mean, sigma0).
class LinearModel {
 public:
  LinearModel(Matrix a, Matrix h, Matrix q, Matrix r, Vector x0_mean, Matrix sigma0);

  int signal_dim() const { return static_cast<int>(a_.rows()); }
  int obs_dim() const { return static_cast<int>(h_.cols()); }
  const Matrix& a() const { return a_; }
  const Matrix& h() const { return h_; }
  const Matrix& q() const { return q_; }
  const Matrix& r() const { return r_; }
  const Vector& x0_mean() const { return x0_mean_; }
  const Matrix& sigma0() const { return sigma0_; }
  const Matrix& r_inverse() const { return r_inv_; }
  const Matrix& q_factor() const { return q_sqrt_; }
  const Matrix& r_factor() const { return r_sqrt_; }
  const Matrix& sigma0_factor() const { return sigma0_sqrt_; }

 private:
  Matrix a_, h_, q_, r_;
  Vector x0_mean_;
  Matrix sigma0_;
  Matrix r_inv_, q_sqrt_, r_sqrt_, sigma0_sqrt_;
};

/// Filter covariance: dS/dt = A^T S + S A + Q - S H R^{-1} H^T S from sigma0,
/// integrated with the same fixed-step 4th-order scheme as every other ODE
/// here, symmetrized each step.
MatrixPath covariance_riccati(const LinearModel& model, const TimeGrid& grid);

/// Control-side Riccati with the time arrow reversed: the same equation run
/// backward from P(T) = sigma0. Node k holds P(t_k).
MatrixPath control_riccati(const LinearModel& model, const TimeGrid& grid);

struct KalmanResult {
  VectorPath mean;
  MatrixPath covariance;
};

/// Kalman-Bucy filter along a gridded observation path: Euler-Maruyama for the
/// conditional mean (it is driven by dZ), 4th-order for the covariance.
KalmanResult kalman_bucy(const LinearModel& model, const VectorPath& z, const TimeGrid& grid);

struct DualLqResult {
  VectorPath y;
  VectorPath u;
  double cost = 0.0;  // realized objective of the feedback solution, by quadrature
};

/// Sweep solution of the dual problem: integrate the control Riccati backward,
/// close the loop with u = -R^{-1} H^T P y, integrate y backward from f, and
/// evaluate the objective along the path.
DualLqResult dual_lq_solve(const LinearModel& model, const Vector& f, const TimeGrid& grid);

struct DualityReport {
  double max_gap = 0.0;    // max_t Frobenius norm of P(T-t) - Sigma(t)
  double tolerance = 0.0;  // max(1e-9, 0.1 * dt)
  bool pass = false;
  ScalarPath gap;
};

/// Time-reversal identity between the control Riccati and the filter
/// covariance, both integrated independently.
DualityReport duality_check(const LinearModel& model, const TimeGrid& grid);

/// Backward dual state for an arbitrary (deterministic) input path.
VectorPath solve_linear_dual(const LinearModel& model, const VectorPath& u, const Vector& f);

/// Objective 0.5 y0.Sigma0 y0 + trapezoid of 0.5 (u.Ru + y.Qy).
double linear_cost(const LinearModel& model, const VectorPath& u, const VectorPath& y);

struct LinearMseStats {
  double mse = 0.0;  // E |S_T - f.X_T|^2
  double se = 0.0;
  int trials = 0;
};

/// Per-trial squared errors |S_T - f.X_T|^2 of S_T = y0.x0_mean - sum u_k.dZ_k
/// for a given deterministic input and its dual state (Euler-Maruyama
/// simulation; per cell the stream is consumed as d signal normals then m
/// noise normals). Trial seeds derive from (seed, index), so two controls
/// evaluated with the same seed share their draws (paired comparisons).
std::vector<double> linear_squared_errors(const LinearModel& model, const Vector& f,
                                          const VectorPath& u, const VectorPath& y, int trials,
                                          std::uint64_t seed);

/// Mean and standard error of linear_squared_errors.
LinearMseStats linear_mse_for_control(const LinearModel& model, const Vector& f,
                                      const VectorPath& u, const VectorPath& y, int trials,
                                      std::uint64_t seed);

struct LinearMseResult {
  LinearMseStats stats;
  double optimal_cost = 0.0;   // J(u*) from the sweep
  double predicted_mse = 0.0;  // f.Sigma_T f
};

/// MSE of the optimal estimator vs the covariance prediction and 2 J(u*).
LinearMseResult linear_estimator_mse(const LinearModel& model, const Vector& f,
                                     const TimeGrid& grid, int trials, std::uint64_t seed);

}  // namespace dualest

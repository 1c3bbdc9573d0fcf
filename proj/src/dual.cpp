#include "dualest/dual.hpp"

#include "dualest/numerics.hpp"

namespace dualest {

DualPath solve_backward(const RateMatrix& a, const ObservationModel& model,
                        const ControlSchedule& ctrl, const Vector& f, const TimeGrid& grid) {
  require_same_grid(ctrl.gain.grid, grid, "solve_backward");
  const int d = a.dim();
  const int m = model.obs_dim();
  if (f.size() != d) throw std::invalid_argument("solve_backward: terminal vector dimension mismatch");
  if (!f.allFinite()) throw std::invalid_argument("solve_backward: terminal vector must be finite");

  DualPath dual(grid, d, m);
  dual.terminal = f;
  Vector y = f;
  dual.y.at(grid.steps()) = y;
  const double h = -grid.dt();
  for (int k = grid.steps() - 1; k >= 0; --k) {
    const Matrix coeff = -(a.entries() + model.h() * ctrl.gain.at(k).transpose());
    const Vector constant = -model.h() * ctrl.offset.at(k);
    y = rk4_step(y, h, [&](const Vector& v) -> Vector { return coeff * v + constant; });
    dual.y.at(k) = y;
  }
  for (int k = 0; k <= grid.steps(); ++k) {
    dual.u.at(k) = ctrl.gain.at(k).transpose() * dual.y.at(k) + ctrl.offset.at(k);
  }
  return dual;
}

MatrixPath transition_matrix(const RateMatrix& a, const ObservationModel& model,
                             const MatrixPath& gain, const TimeGrid& grid) {
  require_same_grid(gain.grid, grid, "transition_matrix");
  const int d = a.dim();
  MatrixPath phi(grid, d, d);
  Matrix current = Matrix::Identity(d, d);
  phi.at(0) = current;
  const double h = grid.dt();
  for (int k = 0; k < grid.steps(); ++k) {
    const Matrix coeff = -(a.entries() + model.h() * gain.at(k).transpose());
    current = rk4_step(current, h, [&](const Matrix& p) -> Matrix { return coeff * p; });
    phi.at(k + 1) = current;
  }
  return phi;
}

DualDecomposition decompose(const DualPath& dual, const ControlSchedule& ctrl,
                            const RateMatrix& a, const ObservationModel& model) {
  return decompose_with(dual, ctrl, a, model,
                        transition_matrix(a, model, ctrl.gain, dual.y.grid));
}

DualDecomposition decompose_with(const DualPath& dual, const ControlSchedule& ctrl,
                                 const RateMatrix& a, const ObservationModel& model,
                                 const MatrixPath& phi) {
  const TimeGrid& grid = dual.y.grid;
  require_same_grid(phi.grid, grid, "decompose");
  const int d = a.dim();
  const int m = model.obs_dim();

  DualDecomposition decomp(grid, d, m);
  decomp.phi = phi;

  // eta solves the same cell ODE forward from zero; together with phi this
  // reconstructs the backward solution, which the invariants check.
  Vector eta = Vector::Zero(d);
  decomp.eta.at(0) = eta;
  const double h = grid.dt();
  for (int k = 0; k < grid.steps(); ++k) {
    const Matrix coeff = -(a.entries() + model.h() * ctrl.gain.at(k).transpose());
    const Vector constant = -model.h() * ctrl.offset.at(k);
    eta = rk4_step(eta, h, [&](const Vector& v) -> Vector { return coeff * v + constant; });
    decomp.eta.at(k + 1) = eta;
  }

  for (int k = 0; k <= grid.steps(); ++k) {
    decomp.kappa.at(k) = decomp.phi.at(k).transpose() * ctrl.gain.at(k);
    decomp.gamma.at(k) = ctrl.gain.at(k).transpose() * decomp.eta.at(k) + ctrl.offset.at(k);
  }
  return decomp;
}

double estimator(const Vector& y0, const Vector& pi0, const DualDecomposition& decomp,
                 const VectorPath& z) {
  require_same_grid(decomp.kappa.grid, z.grid, "estimator");
  const int d = static_cast<int>(y0.size());
  Vector weighted = Vector::Zero(d);  // sum kappa_k dZ_k
  double plain = 0.0;                 // sum gamma_k . dZ_k
  for (int k = 0; k < z.grid.steps(); ++k) {
    const Vector dz = z.at(k + 1) - z.at(k);
    weighted.noalias() += decomp.kappa.at(k) * dz;
    plain += decomp.gamma.at(k).dot(dz);
  }
  return y0.dot(pi0) - (y0.dot(weighted) + plain);
}

ScalarPath error_process(const Vector& y0, const DualDecomposition& decomp, const Vector& x0,
                         const Vector& pi0, const VectorPath& w, const VectorPath& b) {
  require_same_grid(w.grid, b.grid, "error_process");
  require_same_grid(decomp.kappa.grid, w.grid, "error_process");
  const TimeGrid& grid = w.grid;
  const int d = static_cast<int>(y0.size());

  ScalarPath err(grid);
  const double initial = y0.dot(x0 - pi0);
  err.values[0] = initial;

  Vector weighted = Vector::Zero(d);  // sum (kappa_k dW_k + phi_k^T dB_k)
  double plain = 0.0;                 // sum (gamma_k . dW_k + eta_k . dB_k)
  for (int k = 0; k < grid.steps(); ++k) {
    const Vector dw = w.at(k + 1) - w.at(k);
    const Vector db = b.at(k + 1) - b.at(k);
    weighted.noalias() += decomp.kappa.at(k) * dw;
    weighted.noalias() += decomp.phi.at(k).transpose() * db;
    plain += decomp.gamma.at(k).dot(dw) + decomp.eta.at(k).dot(db);
    err.values[k + 1] = initial + y0.dot(weighted) + plain;
  }
  return err;
}

}  // namespace dualest

#pragma once

#include "dualest/ctmc.hpp"
#include "dualest/integrals.hpp"
#include "dualest/observation.hpp"

namespace dualest {

/// Affine control law U_t = K_t^T Y_t + V_t on the grid. Both schedules must be
/// computable from observations up to each node; the solvers hold them constant
/// over each grid cell at the cell's left value.
struct ControlSchedule {
  MatrixPath gain;    // d x m per node
  VectorPath offset;  // m per node

  ControlSchedule(const TimeGrid& grid, int d, int m)
      : gain(grid, d, m), offset(grid, m) {}
};

/// Solution of the terminal-value dual equation together with the realized input.
struct DualPath {
  VectorPath y;     // d per node; y at the last node equals the terminal vector exactly
  VectorPath u;     // m per node, u_k = K_k^T y_k + V_k
  Vector terminal;  // f

  DualPath(const TimeGrid& grid, int d, int m)
      : y(grid, d), u(grid, m), terminal(Vector::Zero(d)) {}
};

/// Affine representation y_k = Phi_k y_0 + eta_k, u_k = kappa_k^T y_0 + gamma_k
/// with all four component paths adapted.
struct DualDecomposition {
  MatrixPath phi;    // d x d per node, identity at node 0
  VectorPath eta;    // d per node, zero at node 0
  MatrixPath kappa;  // d x m per node
  VectorPath gamma;  // m per node

  DualDecomposition(const TimeGrid& grid, int d, int m)
      : phi(grid, d, d), eta(grid, d), kappa(grid, d, m), gamma(grid, m) {}
};

/// Integrate dY/dt = -(A + H K^T) Y - H V backward from Y(T) = f with one
/// classical Runge-Kutta step per grid cell, then record U on the nodes.
DualPath solve_backward(const RateMatrix& a, const ObservationModel& model,
                        const ControlSchedule& ctrl, const Vector& f, const TimeGrid& grid);

/// Fundamental solution of dPhi/dt = -(A + H K^T) Phi, Phi(0) = I, same scheme.
MatrixPath transition_matrix(const RateMatrix& a, const ObservationModel& model,
                             const MatrixPath& gain, const TimeGrid& grid);

/// Split the dual solution into its adapted components. eta is integrated
/// forward independently of the backward pass, so the reconstruction identity
/// is a real check on both solvers.
DualDecomposition decompose(const DualPath& dual, const ControlSchedule& ctrl,
                            const RateMatrix& a, const ObservationModel& model);

/// Same split with a precomputed fundamental solution (it depends on the gain
/// only, so callers evaluating several offsets under one gain can reuse it).
DualDecomposition decompose_with(const DualPath& dual, const ControlSchedule& ctrl,
                                 const RateMatrix& a, const ObservationModel& model,
                                 const MatrixPath& phi);

/// Estimate S_T = y0 . pi0 - integral of U . dZ, with the integral evaluated
/// through the adapted split (y0-weighted sum plus plain sum).
double estimator(const Vector& y0, const Vector& pi0, const DualDecomposition& decomp,
                 const VectorPath& z);

/// Error process on the grid:
///   e_k = y0 . (x0 - pi0) + int_0^{t_k} U . dW + int_0^{t_k} Y . dB,
/// both integrals as left-endpoint sums through the adapted split.
ScalarPath error_process(const Vector& y0, const DualDecomposition& decomp, const Vector& x0,
                         const Vector& pi0, const VectorPath& w, const VectorPath& b);

}  // namespace dualest

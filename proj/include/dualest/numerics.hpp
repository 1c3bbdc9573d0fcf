#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "dualest/grid.hpp"

namespace dualest {

inline Matrix expm(const Matrix& m) { return m.exp(); }

/// One classical Runge-Kutta step of size h for dy/dt = f(y).
/// f must accept and return the state type (Vector or Matrix).
template <class State, class Deriv>
State rk4_step(const State& y, double h, const Deriv& f) {
  const State k1 = f(y);
  const State k2 = f(y + (0.5 * h) * k1);
  const State k3 = f(y + (0.5 * h) * k2);
  const State k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Symmetric PSD square root via self-adjoint eigendecomposition.
/// Small negative eigenvalues from roundoff are clamped to zero.
inline Matrix symmetric_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  Vector vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace dualest

#pragma once

#include "dualest/grid.hpp"

namespace dualest {

/// Scalar process split as phi_t = factor . adapted_vec_t + adapted_scalar_t,
/// where `factor` is a fixed vector (typically the initial dual state, which is
/// only measurable at the final time) and the two path components are adapted.
/// An empty factor means the process is plainly adapted. Every stochastic
/// integral against a non-adapted process is computed through this split, so
/// that only adapted left-endpoint sums are ever accumulated.
struct SplitProcess {
  Vector factor;       // p entries; may be empty
  Matrix adapted_vec;  // p x nodes; empty when factor is empty
  RowVector adapted_scalar;  // 1 x nodes

  int nodes() const { return static_cast<int>(adapted_scalar.size()); }
  double value(int k) const {
    double v = adapted_scalar[k];
    if (factor.size() > 0) v += factor.dot(adapted_vec.col(k));
    return v;
  }

  static SplitProcess adapted(RowVector values) {
    return SplitProcess{Vector(), Matrix(), std::move(values)};
  }
};

/// Left-endpoint (forward) integral of phi against psi over the whole grid,
/// evaluated as the four adapted sums of the split representation:
///   F . (sum xi_k dzeta_k^T) G + F . (sum xi_k dbeta_k)
///     + G . (sum alpha_k dzeta_k) + sum alpha_k dbeta_k.
double forward_integral(const SplitProcess& phi, const SplitProcess& psi);

/// Running forward integral: entry k holds the integral over [t_0, t_k].
RowVector forward_integral_path(const SplitProcess& phi, const SplitProcess& psi);

/// Quadratic covariation sum_k (phi_{k+1}-phi_k)(psi_{k+1}-psi_k), again split
/// into adapted pieces.
double quadratic_covariation(const SplitProcess& phi, const SplitProcess& psi);

}  // namespace dualest

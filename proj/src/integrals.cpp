#include "dualest/integrals.hpp"

namespace dualest {

namespace {

void check_grids(const SplitProcess& phi, const SplitProcess& psi) {
  if (phi.nodes() != psi.nodes() || phi.nodes() < 2) {
    throw std::invalid_argument("forward_integral: integrand and integrator grids do not match");
  }
  if (phi.factor.size() > 0 && phi.adapted_vec.cols() != phi.nodes()) {
    throw std::invalid_argument("forward_integral: split integrand is inconsistent");
  }
  if (psi.factor.size() > 0 && psi.adapted_vec.cols() != psi.nodes()) {
    throw std::invalid_argument("forward_integral: split integrator is inconsistent");
  }
}

}  // namespace

RowVector forward_integral_path(const SplitProcess& phi, const SplitProcess& psi) {
  check_grids(phi, psi);
  const int nodes = phi.nodes();
  const long p = phi.factor.size();
  const long q = psi.factor.size();

  Matrix cross = Matrix::Zero(p, q);  // sum xi_k dzeta_k^T
  Vector vec_scalar = Vector::Zero(p);  // sum xi_k dbeta_k
  Vector scalar_vec = Vector::Zero(q);  // sum alpha_k dzeta_k
  double scalar_scalar = 0.0;           // sum alpha_k dbeta_k

  RowVector out = RowVector::Zero(nodes);
  for (int k = 0; k + 1 < nodes; ++k) {
    const double dbeta = psi.adapted_scalar[k + 1] - psi.adapted_scalar[k];
    const double alpha = phi.adapted_scalar[k];
    scalar_scalar += alpha * dbeta;
    if (p > 0) {
      vec_scalar += phi.adapted_vec.col(k) * dbeta;
    }
    if (q > 0) {
      const Vector dzeta = psi.adapted_vec.col(k + 1) - psi.adapted_vec.col(k);
      scalar_vec += alpha * dzeta;
      if (p > 0) cross += phi.adapted_vec.col(k) * dzeta.transpose();
    }
    double v = scalar_scalar;
    if (p > 0) v += phi.factor.dot(vec_scalar);
    if (q > 0) v += psi.factor.dot(scalar_vec);
    if (p > 0 && q > 0) v += phi.factor.dot(cross * psi.factor);
    out[k + 1] = v;
  }
  return out;
}

double forward_integral(const SplitProcess& phi, const SplitProcess& psi) {
  const RowVector path = forward_integral_path(phi, psi);
  return path[path.size() - 1];
}

double quadratic_covariation(const SplitProcess& phi, const SplitProcess& psi) {
  check_grids(phi, psi);
  const int nodes = phi.nodes();
  const long p = phi.factor.size();
  const long q = psi.factor.size();

  Matrix cross = Matrix::Zero(p, q);
  Vector vec_scalar = Vector::Zero(p);
  Vector scalar_vec = Vector::Zero(q);
  double scalar_scalar = 0.0;

  for (int k = 0; k + 1 < nodes; ++k) {
    const double dalpha = phi.adapted_scalar[k + 1] - phi.adapted_scalar[k];
    const double dbeta = psi.adapted_scalar[k + 1] - psi.adapted_scalar[k];
    scalar_scalar += dalpha * dbeta;
    if (p > 0) {
      const Vector dxi = phi.adapted_vec.col(k + 1) - phi.adapted_vec.col(k);
      vec_scalar += dxi * dbeta;
      if (q > 0) {
        const Vector dzeta = psi.adapted_vec.col(k + 1) - psi.adapted_vec.col(k);
        cross += dxi * dzeta.transpose();
      }
    }
    if (q > 0) {
      const Vector dzeta = psi.adapted_vec.col(k + 1) - psi.adapted_vec.col(k);
      scalar_vec += dalpha * dzeta;
    }
  }
  double v = scalar_scalar;
  if (p > 0) v += phi.factor.dot(vec_scalar);
  if (q > 0) v += psi.factor.dot(scalar_vec);
  if (p > 0 && q > 0) v += phi.factor.dot(cross * psi.factor);
  return v;
}

}  // namespace dualest

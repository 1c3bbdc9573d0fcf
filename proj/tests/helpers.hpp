#pragma once

#include "dualest/ctmc.hpp"
#include "dualest/observation.hpp"
#include "dualest/rng.hpp"

namespace dualest::testing {

/// Random generator with off-diagonal rates in [lo, hi].
inline RateMatrix random_rate_matrix(Rng& rng, int d, double lo = 0.5, double hi = 3.0) {
  Matrix a = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      a(i, j) = lo + (hi - lo) * rng.uniform();
      row += a(i, j);
    }
    a(i, i) = -row;
  }
  return RateMatrix(a);
}

inline Vector random_simplex(Rng& rng, int d) {
  Vector p(d);
  for (int i = 0; i < d; ++i) p[i] = -std::log1p(-rng.uniform());
  return p / p.sum();
}

inline Matrix random_spd(Rng& rng, int m, double base = 0.3) {
  Matrix g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = rng.normal();
  return g * g.transpose() + base * Matrix::Identity(m, m);
}

inline ObservationModel random_observation_model(Rng& rng, int d, int m) {
  Matrix h(d, m);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < m; ++j) h(i, j) = 2.0 * rng.uniform() - 1.0;
  return ObservationModel(h, random_spd(rng, m));
}

}  // namespace dualest::testing

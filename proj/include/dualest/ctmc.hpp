#pragma once

#include <cstdint>
#include <vector>

#include "dualest/grid.hpp"
#include "dualest/rng.hpp"

namespace dualest {

/// Generator of a finite-state Markov chain. Entry (i, j), i != j, is the jump
/// rate from state i to state j; rows sum to zero; the signal dynamics read the
/// matrix transposed (dX = A^T X dt + dB).
class RateMatrix {
 public:
  explicit RateMatrix(Matrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double rate(int from, int to) const { return entries_(from, to); }
  double exit_rate(int state) const { return -entries_(state, state); }

  /// Distribution solving pi^T A = 0, sum pi = 1 (least squares; unique for
  /// irreducible chains). Used by statistical checks.
  Vector stationary() const;

 private:
  Matrix entries_;
};

/// Probability-vector validation: nonnegative entries summing to one.
void validate_simplex(const Vector& p, double tol = 1e-10);

/// Piecewise-constant trajectory of the chain: the state on [0,T] with its jump
/// times. States are 0-based indices into the canonical basis of R^d.
struct JumpPath {
  int dim = 0;
  double horizon = 0.0;
  std::vector<double> jump_times;  // strictly increasing, in (0, horizon)
  std::vector<int> states;         // one per inter-jump interval; size = jumps + 1

  JumpPath(int dim, double horizon, std::vector<double> jump_times, std::vector<int> states);

  int jump_count() const { return static_cast<int>(jump_times.size()); }

  /// State index at time t, right-continuous at jumps. Requires 0 <= t <= horizon.
  int state_at(double t) const;

  /// Occupation integral of the basis-vector path over [a, b] (componentwise
  /// time spent in each state; exact across jumps).
  Vector occupation(double a, double b) const;
};

/// Canonical basis vector e_{state(t)}, right-continuous at jumps.
Vector state_vector(const JumpPath& path, double t);

/// Exact jump-process sample: initial state from pi0, holding times
/// exponential with the exit rate, destination proportional to the off-diagonal
/// rates. The stream is consumed in a fixed order: one uniform for the initial
/// state, then per jump one uniform for the holding time followed by one for
/// the destination. Absorbing states (zero exit rate) hold forever.
JumpPath simulate_ctmc(const RateMatrix& a, const Vector& pi0, double horizon, Rng& rng);
JumpPath simulate_ctmc(const RateMatrix& a, const Vector& pi0, double horizon, std::uint64_t seed);

/// Running sum of (e_j - e_i)(e_j - e_i)^T over the jumps up to each grid node;
/// a jump inside (t_k, t_{k+1}] is counted at node k+1.
MatrixPath quadratic_variation(const JumpPath& path, const TimeGrid& grid);

/// Martingale part B_t = X_t - integral of A^T X over [0, t], evaluated on the
/// grid with the drift integrated exactly between jumps.
VectorPath martingale_part(const JumpPath& path, const RateMatrix& a, const TimeGrid& grid);

/// Jump covariance of state i: sum over j != i of A_ij (e_j - e_i)(e_j - e_i)^T.
Matrix q_of_state(const RateMatrix& a, int state);

}  // namespace dualest

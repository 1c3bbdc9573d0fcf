#include "dualest/ctmc.hpp"

#include <algorithm>
#include <cmath>

namespace dualest {

RateMatrix::RateMatrix(Matrix entries) : entries_(std::move(entries)) {
  const auto d = entries_.rows();
  if (d < 2 || entries_.cols() != d) {
    throw std::invalid_argument("RateMatrix: need a square matrix with dim >= 2");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && entries_(i, j) < 0.0) {
        throw std::invalid_argument("RateMatrix: off-diagonal entries must be nonnegative");
      }
      row_sum += entries_(i, j);
    }
    if (std::abs(row_sum) > 1e-12) {
      throw std::invalid_argument("RateMatrix: rows must sum to zero");
    }
  }
}

Vector RateMatrix::stationary() const {
  const int d = dim();
  Matrix system(d + 1, d);
  system.topRows(d) = entries_.transpose();
  system.bottomRows(1).setOnes();
  Vector rhs = Vector::Zero(d + 1);
  rhs[d] = 1.0;
  Vector pi = system.colPivHouseholderQr().solve(rhs);
  return pi.cwiseMax(0.0) / pi.cwiseMax(0.0).sum();
}

void validate_simplex(const Vector& p, double tol) {
  if (p.size() < 1) throw std::invalid_argument("simplex: empty vector");
  if (p.minCoeff() < 0.0) throw std::invalid_argument("simplex: negative entry");
  if (std::abs(p.sum() - 1.0) > tol) throw std::invalid_argument("simplex: entries must sum to one");
}

JumpPath::JumpPath(int dim_in, double horizon_in, std::vector<double> jump_times_in,
                   std::vector<int> states_in)
    : dim(dim_in), horizon(horizon_in), jump_times(std::move(jump_times_in)),
      states(std::move(states_in)) {
  if (dim < 2) throw std::invalid_argument("JumpPath: dim must be >= 2");
  if (horizon <= 0.0) throw std::invalid_argument("JumpPath: horizon must be positive");
  if (states.size() != jump_times.size() + 1) {
    throw std::invalid_argument("JumpPath: need one state per inter-jump interval");
  }
  double prev = 0.0;
  for (std::size_t k = 0; k < jump_times.size(); ++k) {
    if (!(jump_times[k] > prev) || !(jump_times[k] < horizon)) {
      throw std::invalid_argument("JumpPath: jump times must be strictly increasing in (0, horizon)");
    }
    prev = jump_times[k];
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] < 0 || states[k] >= dim) throw std::invalid_argument("JumpPath: state out of range");
    if (k > 0 && states[k] == states[k - 1]) {
      throw std::invalid_argument("JumpPath: consecutive states must differ");
    }
  }
}

int JumpPath::state_at(double t) const {
  if (t < 0.0 || t > horizon) throw std::out_of_range("JumpPath: time outside [0, horizon]");
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return states[static_cast<std::size_t>(it - jump_times.begin())];
}

Vector JumpPath::occupation(double a, double b) const {
  if (a < 0.0 || b > horizon || a > b) throw std::out_of_range("JumpPath: bad occupation window");
  Vector occ = Vector::Zero(dim);
  // First interval index whose right edge lies beyond a.
  std::size_t idx = static_cast<std::size_t>(
      std::upper_bound(jump_times.begin(), jump_times.end(), a) - jump_times.begin());
  double left = a;
  while (left < b) {
    const double right = idx < jump_times.size() ? std::min(jump_times[idx], b) : b;
    occ[states[idx]] += right - left;
    left = right;
    ++idx;
  }
  return occ;
}

Vector state_vector(const JumpPath& path, double t) {
  Vector e = Vector::Zero(path.dim);
  e[path.state_at(t)] = 1.0;
  return e;
}

JumpPath simulate_ctmc(const RateMatrix& a, const Vector& pi0, double horizon, Rng& rng) {
  if (pi0.size() != a.dim()) throw std::invalid_argument("simulate_ctmc: pi0 dimension mismatch");
  validate_simplex(pi0);
  if (horizon <= 0.0) throw std::invalid_argument("simulate_ctmc: horizon must be positive");

  std::vector<double> jump_times;
  std::vector<int> states;
  int state = rng.categorical(pi0);
  states.push_back(state);

  double t = 0.0;
  while (true) {
    const double rate = a.exit_rate(state);
    if (rate <= 0.0) break;  // absorbing: holds forever
    t += rng.exponential(rate);
    if (t >= horizon) break;
    Vector weights = a.entries().row(state).transpose().cwiseMax(0.0);
    weights[state] = 0.0;
    state = rng.categorical(weights);
    jump_times.push_back(t);
    states.push_back(state);
  }
  return JumpPath(a.dim(), horizon, std::move(jump_times), std::move(states));
}

JumpPath simulate_ctmc(const RateMatrix& a, const Vector& pi0, double horizon, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_ctmc(a, pi0, horizon, rng);
}

MatrixPath quadratic_variation(const JumpPath& path, const TimeGrid& grid) {
  const int d = path.dim;
  MatrixPath qv(grid, d, d);
  Matrix running = Matrix::Zero(d, d);
  std::size_t jump = 0;
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    while (jump < path.jump_times.size() && path.jump_times[jump] <= t) {
      const int from = path.states[jump];
      const int to = path.states[jump + 1];
      Vector delta = Vector::Zero(d);
      delta[to] = 1.0;
      delta[from] = -1.0;
      running += delta * delta.transpose();
      ++jump;
    }
    qv.at(k) = running;
  }
  return qv;
}

VectorPath martingale_part(const JumpPath& path, const RateMatrix& a, const TimeGrid& grid) {
  const int d = path.dim;
  VectorPath b(grid, d);
  Vector cumulative_occ = Vector::Zero(d);
  b.at(0) = state_vector(path, 0.0);
  for (int k = 1; k <= grid.steps(); ++k) {
    cumulative_occ += path.occupation(grid.time(k - 1), grid.time(k));
    b.at(k) = state_vector(path, grid.time(k)) - a.entries().transpose() * cumulative_occ;
  }
  return b;
}

Matrix q_of_state(const RateMatrix& a, int state) {
  const int d = a.dim();
  if (state < 0 || state >= d) throw std::out_of_range("q_of_state: state out of range");
  Matrix q = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    if (j == state) continue;
    const double rate = a.rate(state, j);
    if (rate == 0.0) continue;
    Vector delta = Vector::Zero(d);
    delta[j] = 1.0;
    delta[state] = -1.0;
    q += rate * (delta * delta.transpose());
  }
  return q;
}

}  // namespace dualest

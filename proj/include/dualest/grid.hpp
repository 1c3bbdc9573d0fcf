#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dualest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Uniform time grid 0 = t_0 < t_1 < ... < t_N = T with t_k = k*dt.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    if (horizon <= 0.0) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  }

  /// Build from a step size; dt must divide the horizon (1e-9 relative slack).
  static TimeGrid with_step(double horizon, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("TimeGrid: dt must be positive");
    const double ratio = horizon / dt;
    const auto steps = static_cast<long>(ratio + 0.5);
    if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio + 1e-12) {
      throw std::invalid_argument("TimeGrid: dt does not divide horizon");
    }
    return TimeGrid(horizon, static_cast<int>(steps));
  }

  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / steps_; }
  double time(int k) const { return k == steps_ ? horizon_ : k * dt(); }

  bool operator==(const TimeGrid& other) const {
    return steps_ == other.steps_ && horizon_ == other.horizon_;
  }

 private:
  double horizon_;
  int steps_;
};

/// Vector-valued path on a TimeGrid; values stored one column per node.
struct VectorPath {
  TimeGrid grid;
  Matrix values;  // dim x nodes

  VectorPath(const TimeGrid& g, int dim) : grid(g), values(Matrix::Zero(dim, g.nodes())) {}
  int dim() const { return static_cast<int>(values.rows()); }
  auto at(int k) { return values.col(k); }
  auto at(int k) const { return values.col(k); }
};

/// Scalar path on a TimeGrid.
struct ScalarPath {
  TimeGrid grid;
  RowVector values;  // 1 x nodes

  explicit ScalarPath(const TimeGrid& g) : grid(g), values(RowVector::Zero(g.nodes())) {}
};

/// Matrix-valued path; node k occupies the column block [k*block_cols, (k+1)*block_cols).
struct MatrixPath {
  TimeGrid grid;
  int block_rows;
  int block_cols;
  Matrix data;

  MatrixPath(const TimeGrid& g, int rows, int cols)
      : grid(g), block_rows(rows), block_cols(cols),
        data(Matrix::Zero(rows, static_cast<long>(cols) * g.nodes())) {}

  auto at(int k) { return data.middleCols(static_cast<long>(k) * block_cols, block_cols); }
  auto at(int k) const { return data.middleCols(static_cast<long>(k) * block_cols, block_cols); }
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const std::string& what) {
  if (!(a == b)) throw std::invalid_argument(what + ": grids do not match");
}

}  // namespace dualest

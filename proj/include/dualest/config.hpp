#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualest/grid.hpp"

namespace dualest {

/// Parse failure with the offending file line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, int line, const std::string& message)
      : std::runtime_error(where + ":" + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// One scenario as read from a key = value file. Matrix values use ';' between
/// rows and whitespace between entries. Type invariants (rate matrix rows,
/// simplex, SPD noise, dt dividing T) are enforced at load.
struct ScenarioConfig {
  enum class Kind { FiniteState, LinearGaussian };

  Kind kind = Kind::FiniteState;
  int d = 0;
  int m = 0;
  Matrix a;  // rate matrix (finite-state) or drift (linear)
  Matrix h;  // d x m
  Matrix r;  // m x m
  Vector pi0;
  Vector f;
  double horizon = 1.0;
  double dt = 1e-3;
  int trials = 10000;
  std::uint64_t seed = 0;

  std::vector<std::string> variants;  // duality/sweep control variants
  Matrix det_gain;                    // constant deterministic gain (may be empty)
  Vector det_offset;                  // constant deterministic offset (may be empty)
  std::string offset_kind = "adapted";  // offset flavor for optimal+v: constant | adapted
  double offset_scale = 0.4;
  std::uint64_t offset_seed = 1;

  // linear-gaussian extras
  Matrix q;
  Matrix sigma0;
  Vector x0hat;

  // sweep controls
  std::string sweep = "dt";  // dt | trials
  std::vector<double> sweep_values;
  int filter_seeds = 100;
  int output_stride = 1;  // emit every n-th grid node in path CSVs

  TimeGrid make_grid() const { return TimeGrid::with_step(horizon, dt); }
};

ScenarioConfig parse_config_file(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& name);

}  // namespace dualest

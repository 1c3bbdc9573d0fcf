#include "dualest/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "dualest/cost.hpp"
#include "dualest/kalman.hpp"

namespace dualest {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct RawEntry {
  std::string value;
  int line = 0;
};

class Parser {
 public:
  Parser(const std::string& text, std::string where) : where_(std::move(where)) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(where_, number, "expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError(where_, number, "empty key");
      if (entries_.count(key)) {
        throw ConfigError(where_, number, "duplicate key '" + key + "'");
      }
      entries_[key] = RawEntry{value, number};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto it = entries_.find(key);
    throw ConfigError(where_, it == entries_.end() ? 0 : it->second.line,
                      "key '" + key + "': " + message);
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  std::string require_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(where_, 0, "missing required key '" + key + "'");
    return it->second.value;
  }

  double parse_double_token(const std::string& key, const std::string& tok) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail(key, "expected number, got '" + tok + "'");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail(key, "expected number, got '" + tok + "'");
    }
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double_token(key, entries_.at(key).value);
  }

  long get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = parse_double_token(key, entries_.at(key).value);
    const long out = static_cast<long>(v);
    if (static_cast<double>(out) != v) fail(key, "expected integer");
    return out;
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& value = entries_.at(key).value;
    std::uint64_t out = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      fail(key, "expected unsigned integer");
    }
    return out;
  }

  Vector get_vector(const std::string& key, int expected) const {
    const auto toks = split_ws(entries_.at(key).value);
    if (expected >= 0 && static_cast<int>(toks.size()) != expected) {
      fail(key, "expected " + std::to_string(expected) + " entries, got " +
                    std::to_string(toks.size()));
    }
    Vector out(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) out[i] = parse_double_token(key, toks[i]);
    return out;
  }

  Matrix get_matrix(const std::string& key, int rows, int cols) const {
    std::vector<std::string> row_text;
    {
      std::string value = entries_.at(key).value;
      std::size_t start = 0;
      while (true) {
        const auto semi = value.find(';', start);
        row_text.push_back(value.substr(start, semi - start));
        if (semi == std::string::npos) break;
        start = semi + 1;
      }
    }
    if (rows >= 0 && static_cast<int>(row_text.size()) != rows) {
      fail(key, "expected " + std::to_string(rows) + " rows, got " +
                    std::to_string(row_text.size()));
    }
    Matrix out;
    for (std::size_t i = 0; i < row_text.size(); ++i) {
      const auto toks = split_ws(row_text[i]);
      if (i == 0) {
        if (cols >= 0 && static_cast<int>(toks.size()) != cols) {
          fail(key, "expected " + std::to_string(cols) + " entries per row");
        }
        out.resize(row_text.size(), toks.size());
      } else if (static_cast<int>(toks.size()) != out.cols()) {
        fail(key, "rows have inconsistent lengths");
      }
      for (std::size_t j = 0; j < toks.size(); ++j) {
        out(i, j) = parse_double_token(key, toks[j]);
      }
    }
    return out;
  }

  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const std::string& where() const { return where_; }

 private:
  std::string where_;
  std::map<std::string, RawEntry> entries_;
};

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& name) {
  Parser p(text, name);
  ScenarioConfig cfg;

  const std::string kind = p.get_string("kind", "finite-state");
  if (kind == "finite-state") {
    cfg.kind = ScenarioConfig::Kind::FiniteState;
  } else if (kind == "linear-gaussian") {
    cfg.kind = ScenarioConfig::Kind::LinearGaussian;
  } else {
    p.fail("kind", "must be finite-state or linear-gaussian");
  }

  cfg.d = static_cast<int>(p.get_long("d", 0));
  cfg.m = static_cast<int>(p.get_long("m", 0));
  if (cfg.d < 1) throw ConfigError(name, p.line_of("d"), "key 'd': must be a positive dimension");
  if (cfg.m < 1) throw ConfigError(name, p.line_of("m"), "key 'm': must be a positive dimension");

  cfg.a = p.get_matrix("A", cfg.d, cfg.d);
  cfg.h = p.has("H") ? p.get_matrix("H", cfg.d, cfg.m) : Matrix::Zero(cfg.d, cfg.m);
  cfg.r = p.has("R") ? p.get_matrix("R", cfg.m, cfg.m)
                     : Matrix(Matrix::Identity(cfg.m, cfg.m));
  cfg.horizon = p.get_double("T", 1.0);
  cfg.dt = p.get_double("dt", 1e-3);
  cfg.trials = static_cast<int>(p.get_long("trials", 10000));
  cfg.seed = p.get_seed("seed", 0);
  cfg.f = p.has("f") ? p.get_vector("f", cfg.d) : Vector(Vector::Zero(cfg.d));
  cfg.output_stride = static_cast<int>(p.get_long("output_stride", 1));
  if (cfg.output_stride < 1) p.fail("output_stride", "must be >= 1");
  if (cfg.trials < 2) p.fail("trials", "need at least two trials");

  if (p.has("variants")) {
    cfg.variants = split_ws(p.require_string("variants"));
  } else {
    cfg.variants = {p.get_string("control", "optimal")};
  }
  if (p.has("det_gain")) cfg.det_gain = p.get_matrix("det_gain", cfg.d, cfg.m);
  if (p.has("det_offset")) cfg.det_offset = p.get_vector("det_offset", cfg.m);
  cfg.offset_kind = p.get_string("v_kind", "adapted");
  if (cfg.offset_kind != "adapted" && cfg.offset_kind != "constant") {
    p.fail("v_kind", "must be adapted or constant");
  }
  cfg.offset_scale = p.get_double("v_scale", 0.4);
  cfg.offset_seed = p.get_seed("v_seed", 1);

  cfg.sweep = p.get_string("sweep", "dt");
  if (cfg.sweep != "dt" && cfg.sweep != "trials") p.fail("sweep", "must be dt or trials");
  if (p.has("sweep_values")) {
    const Vector vals = p.get_vector("sweep_values", -1);
    cfg.sweep_values.assign(vals.data(), vals.data() + vals.size());
  }
  cfg.filter_seeds = static_cast<int>(p.get_long("filter_seeds", 100));

  // Invariants are enforced by constructing the real model objects now.
  try {
    TimeGrid::with_step(cfg.horizon, cfg.dt);
  } catch (const std::exception& e) {
    throw ConfigError(name, p.line_of("dt"), std::string("key 'dt': ") + e.what());
  }

  if (cfg.kind == ScenarioConfig::Kind::FiniteState) {
    cfg.pi0 = p.has("pi0") ? p.get_vector("pi0", cfg.d)
                           : Vector(Vector::Constant(cfg.d, 1.0 / cfg.d));
    try {
      RateMatrix rates(cfg.a);
      ObservationModel model(cfg.h, cfg.r);
      validate_simplex(cfg.pi0);
    } catch (const std::exception& e) {
      throw ConfigError(name, p.line_of("A"), e.what());
    }
  } else {
    cfg.q = p.has("Q") ? p.get_matrix("Q", cfg.d, cfg.d) : Matrix(Matrix::Zero(cfg.d, cfg.d));
    cfg.sigma0 = p.has("Sigma0") ? p.get_matrix("Sigma0", cfg.d, cfg.d)
                                 : Matrix(Matrix::Identity(cfg.d, cfg.d));
    cfg.x0hat = p.has("x0hat") ? p.get_vector("x0hat", cfg.d) : Vector(Vector::Zero(cfg.d));
    try {
      LinearModel model(cfg.a, cfg.h, cfg.q, cfg.r, cfg.x0hat, cfg.sigma0);
    } catch (const std::exception& e) {
      throw ConfigError(name, p.line_of("A"), e.what());
    }
  }
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace dualest

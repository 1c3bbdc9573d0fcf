#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualest/cost.hpp"
#include "dualest/kalman.hpp"
#include "dualest/version.hpp"

namespace py = pybind11;
using namespace dualest;

namespace {

Matrix path_to_numpy(const VectorPath& path) { return path.values.transpose(); }

VectorPath numpy_to_path(const Matrix& values, double horizon) {
  // rows = nodes, cols = dim
  const int nodes = static_cast<int>(values.rows());
  if (nodes < 2) throw std::invalid_argument("path needs at least two nodes");
  VectorPath path(TimeGrid(horizon, nodes - 1), static_cast<int>(values.cols()));
  path.values = values.transpose();
  return path;
}

std::vector<Matrix> matrix_path_to_list(const MatrixPath& path) {
  std::vector<Matrix> out;
  out.reserve(path.grid.nodes());
  for (int k = 0; k <= path.grid.steps(); ++k) out.push_back(path.at(k));
  return out;
}

py::dict summarize_variant(const VariantResult& variant) {
  py::dict out;
  out["name"] = variant.name;
  out["trials_used"] = variant.total.count;
  out["excluded"] = variant.excluded;
  out["clamp_steps"] = variant.clamp_steps;
  out["filter_steps"] = variant.filter_steps;
  out["j_mean"] = variant.total.mean;
  out["j_se"] = variant.total.se;
  out["mse_mean"] = variant.mse.mean;
  out["mse_se"] = variant.mse.se;
  out["initial_mean"] = variant.initial_term.mean;
  out["energy_mean"] = variant.control_energy.mean;
  out["qv_mean"] = variant.quadratic_variation_term.mean;
  out["martingale_mean"] = variant.martingale_term.mean;
  out["martingale_se"] = variant.martingale_term.se;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimum-variance estimation for finite-state Markov chains via duality";
#ifdef DUALEST_VERSION
  m.attr("__version__") = DUALEST_VERSION;
#else
  m.attr("__version__") = kVersion;
#endif

  py::register_exception<FilterBlowupError>(m, "FilterBlowupError");

  py::class_<JumpPath>(m, "JumpPath")
      .def_readonly("dim", &JumpPath::dim)
      .def_readonly("horizon", &JumpPath::horizon)
      .def_readonly("jump_times", &JumpPath::jump_times)
      .def_readonly("states", &JumpPath::states)
      .def("state_at", &JumpPath::state_at, py::arg("t"))
      .def("__repr__", [](const JumpPath& p) {
        return "JumpPath(dim=" + std::to_string(p.dim) +
               ", jumps=" + std::to_string(p.jump_count()) + ")";
      });

  m.def(
      "simulate_ctmc",
      [](const Matrix& a, const Vector& pi0, double horizon, std::uint64_t seed) {
        return simulate_ctmc(RateMatrix(a), pi0, horizon, seed);
      },
      py::arg("a"), py::arg("pi0"), py::arg("horizon"), py::arg("seed"));

  m.def(
      "state_vector", [](const JumpPath& path, double t) { return state_vector(path, t); },
      py::arg("path"), py::arg("t"));

  m.def(
      "stationary_distribution", [](const Matrix& a) { return RateMatrix(a).stationary(); },
      py::arg("a"));

  m.def(
      "q_of_state", [](const Matrix& a, int state) { return q_of_state(RateMatrix(a), state); },
      py::arg("a"), py::arg("state"));

  m.def(
      "quadratic_variation",
      [](const JumpPath& path, int steps) {
        return matrix_path_to_list(quadratic_variation(path, TimeGrid(path.horizon, steps)));
      },
      py::arg("path"), py::arg("steps"));

  m.def(
      "martingale_part",
      [](const JumpPath& path, const Matrix& a, int steps) {
        return path_to_numpy(martingale_part(path, RateMatrix(a), TimeGrid(path.horizon, steps)));
      },
      py::arg("path"), py::arg("a"), py::arg("steps"));

  m.def(
      "simulate_observation",
      [](const JumpPath& path, const Matrix& h, const Matrix& r, int steps, std::uint64_t seed) {
        const ObservationRecord rec =
            simulate_observation(path, ObservationModel(h, r), TimeGrid(path.horizon, steps), seed);
        return py::make_tuple(path_to_numpy(rec.z), path_to_numpy(rec.w));
      },
      py::arg("path"), py::arg("h"), py::arg("r"), py::arg("steps"), py::arg("seed"));

  m.def("conditional_covariance", &conditional_covariance, py::arg("pi"));

  m.def(
      "optimal_gain",
      [](const Vector& pi, const Matrix& h, const Matrix& r) {
        return optimal_gain(pi, ObservationModel(h, r));
      },
      py::arg("pi"), py::arg("h"), py::arg("r"));

  m.def(
      "run_wonham",
      [](const Matrix& z, double horizon, const Vector& pi0, const Matrix& a, const Matrix& h,
         const Matrix& r) {
        const FilterResult res =
            run_wonham(numpy_to_path(z, horizon), pi0, RateMatrix(a), ObservationModel(h, r));
        py::dict out;
        out["pi"] = path_to_numpy(res.pi);
        out["gains"] = matrix_path_to_list(res.gain);
        out["clamp_count"] = res.clamp_count;
        return out;
      },
      py::arg("z"), py::arg("horizon"), py::arg("pi0"), py::arg("a"), py::arg("h"), py::arg("r"));

  m.def(
      "bayes_oracle",
      [](const Matrix& z, double horizon, const Vector& pi0, const Matrix& a, const Matrix& h,
         const Matrix& r) {
        return path_to_numpy(
            bayes_oracle(numpy_to_path(z, horizon), pi0, RateMatrix(a), ObservationModel(h, r)));
      },
      py::arg("z"), py::arg("horizon"), py::arg("pi0"), py::arg("a"), py::arg("h"), py::arg("r"));

  m.def(
      "solve_backward",
      [](const Matrix& a, const Matrix& h, const Matrix& r, const Matrix& gain,
         const Vector& offset, const Vector& f, double horizon, int steps) {
        const RateMatrix rates(a);
        const ObservationModel model(h, r);
        const TimeGrid grid(horizon, steps);
        ControlSchedule ctrl(grid, rates.dim(), model.obs_dim());
        for (int k = 0; k <= steps; ++k) {
          ctrl.gain.at(k) = gain;
          ctrl.offset.at(k) = offset;
        }
        const DualPath dual = solve_backward(rates, model, ctrl, f, grid);
        return py::make_tuple(path_to_numpy(dual.y), path_to_numpy(dual.u));
      },
      py::arg("a"), py::arg("h"), py::arg("r"), py::arg("gain"), py::arg("offset"), py::arg("f"),
      py::arg("horizon"), py::arg("steps"),
      "Backward dual solve with a constant gain/offset schedule");

  m.def(
      "deterministic_cost",
      [](const Matrix& a, const Matrix& h, const Matrix& r, const Vector& pi0, const Vector& f,
         double horizon, int steps, const Matrix& gain, const Vector& offset) {
        const Scenario sc(RateMatrix(a), ObservationModel(h, r), pi0, f,
                          TimeGrid(horizon, steps));
        return deterministic_cost(
            sc, [gain](int, double) { return gain; }, [offset](int, double) { return offset; });
      },
      py::arg("a"), py::arg("h"), py::arg("r"), py::arg("pi0"), py::arg("f"), py::arg("horizon"),
      py::arg("steps"), py::arg("gain"), py::arg("offset"));

  m.def(
      "cost_monte_carlo",
      [](const Matrix& a, const Matrix& h, const Matrix& r, const Vector& pi0, const Vector& f,
         double horizon, int steps, const std::vector<std::string>& variants, int trials,
         std::uint64_t seed, double offset_scale, std::uint64_t offset_seed) {
        const Scenario sc(RateMatrix(a), ObservationModel(h, r), pi0, f,
                          TimeGrid(horizon, steps));
        VariantOptions options;
        options.offset_scale = offset_scale;
        options.offset_seed = offset_seed;
        std::vector<ControlVariant> specs;
        for (const auto& name : variants) {
          specs.push_back(variant_from_name(name, sc.d(), sc.m(), options));
        }
        const ExperimentResult result = cost_monte_carlo(sc, specs, trials, seed);
        py::list out;
        for (const auto& variant : result.variants) out.append(summarize_variant(variant));
        return out;
      },
      py::arg("a"), py::arg("h"), py::arg("r"), py::arg("pi0"), py::arg("f"), py::arg("horizon"),
      py::arg("steps"), py::arg("variants"), py::arg("trials"), py::arg("seed"),
      py::arg("offset_scale") = 0.4, py::arg("offset_seed") = 1);

  m.def(
      "filter_gap_study",
      [](const Matrix& a, const Matrix& h, const Matrix& r, const Vector& pi0, double horizon,
         const std::vector<double>& dts, int seeds, std::uint64_t seed) {
        return filter_gap_study(RateMatrix(a), ObservationModel(h, r), pi0, horizon, dts, seeds,
                                seed);
      },
      py::arg("a"), py::arg("h"), py::arg("r"), py::arg("pi0"), py::arg("horizon"), py::arg("dts"),
      py::arg("seeds"), py::arg("seed"));

  m.def(
      "kalman_bucy",
      [](const Matrix& a, const Matrix& h, const Matrix& q, const Matrix& r, const Vector& x0,
         const Matrix& sigma0, const Matrix& z, double horizon) {
        const LinearModel model(a, h, q, r, x0, sigma0);
        const VectorPath zp = numpy_to_path(z, horizon);
        const KalmanResult res = kalman_bucy(model, zp, zp.grid);
        return py::make_tuple(path_to_numpy(res.mean), matrix_path_to_list(res.covariance));
      },
      py::arg("a"), py::arg("h"), py::arg("q"), py::arg("r"), py::arg("x0"), py::arg("sigma0"),
      py::arg("z"), py::arg("horizon"));

  m.def(
      "duality_check",
      [](const Matrix& a, const Matrix& h, const Matrix& q, const Matrix& r, const Vector& x0,
         const Matrix& sigma0, double horizon, int steps) {
        const DualityReport report =
            duality_check(LinearModel(a, h, q, r, x0, sigma0), TimeGrid(horizon, steps));
        py::dict out;
        out["max_gap"] = report.max_gap;
        out["tolerance"] = report.tolerance;
        out["pass"] = report.pass;
        return out;
      },
      py::arg("a"), py::arg("h"), py::arg("q"), py::arg("r"), py::arg("x0"), py::arg("sigma0"),
      py::arg("horizon"), py::arg("steps"));

  m.def(
      "dual_lq_solve",
      [](const Matrix& a, const Matrix& h, const Matrix& q, const Matrix& r, const Vector& x0,
         const Matrix& sigma0, const Vector& f, double horizon, int steps) {
        const DualLqResult res =
            dual_lq_solve(LinearModel(a, h, q, r, x0, sigma0), f, TimeGrid(horizon, steps));
        py::dict out;
        out["y"] = path_to_numpy(res.y);
        out["u"] = path_to_numpy(res.u);
        out["cost"] = res.cost;
        return out;
      },
      py::arg("a"), py::arg("h"), py::arg("q"), py::arg("r"), py::arg("x0"), py::arg("sigma0"),
      py::arg("f"), py::arg("horizon"), py::arg("steps"));

  m.def(
      "linear_estimator_mse",
      [](const Matrix& a, const Matrix& h, const Matrix& q, const Matrix& r, const Vector& x0,
         const Matrix& sigma0, const Vector& f, double horizon, int steps, int trials,
         std::uint64_t seed) {
        const LinearMseResult res = linear_estimator_mse(LinearModel(a, h, q, r, x0, sigma0), f,
                                                         TimeGrid(horizon, steps), trials, seed);
        py::dict out;
        out["mse"] = res.stats.mse;
        out["mse_se"] = res.stats.se;
        out["optimal_cost"] = res.optimal_cost;
        out["predicted_mse"] = res.predicted_mse;
        return out;
      },
      py::arg("a"), py::arg("h"), py::arg("q"), py::arg("r"), py::arg("x0"), py::arg("sigma0"),
      py::arg("f"), py::arg("horizon"), py::arg("steps"), py::arg("trials"), py::arg("seed"));
}

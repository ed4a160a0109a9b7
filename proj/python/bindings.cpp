#include "sketchls/geometry.hpp"
#include "sketchls/harness.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/solve.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sketchls;
using nlohmann::json;

namespace {

// Dicts cross the boundary as JSON text; the Python package does the dumps/loads.
ConstraintSpec parse_constraint(const std::string& text) {
  return constraint_from_json(json::parse(text));
}

SketchOperator make_op(const std::string& kind, Index m, std::uint64_t seed, Index n) {
  return SketchOperator::build({sketch_kind_from_string(kind), m, seed}, n);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sketched constrained least squares";

  py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("sketch_apply",
        [](const std::string& kind, Index rows, std::uint64_t seed, const Matrix& mat) {
          return make_op(kind, rows, seed, mat.rows()).apply(mat);
        },
        py::arg("kind"), py::arg("m"), py::arg("seed"), py::arg("matrix"));
  m.def("sketch_dense",
        [](const std::string& kind, Index rows, std::uint64_t seed, Index n) {
          return make_op(kind, rows, seed, n).dense();
        },
        py::arg("kind"), py::arg("m"), py::arg("seed"), py::arg("n"));

  m.def("project",
        [](const Vector& v, const std::string& constraint) {
          return project(parse_constraint(constraint), v);
        },
        py::arg("v"), py::arg("constraint"));

  m.def("solve",
        [](const Matrix& a, const Vector& y, const std::string& constraint,
           const std::string& solver) {
          const auto p = make_problem(a, y, parse_constraint(constraint));
          const auto s = sketchls::solve(p, solver_options_from_json(json::parse(solver)));
          py::dict out;
          out["x"] = s.x;
          out["objective"] = s.objective;
          out["iterations"] = s.iterations;
          out["feasibility_gap"] = s.feasibility_gap;
          out["converged"] = s.converged;
          return out;
        },
        py::arg("a"), py::arg("y"), py::arg("constraint"), py::arg("solver") = "{}");

  m.def("recommend",
        [](const std::string& formula, double delta, double c0, const std::string& params) {
          const auto r = recommend_sketch_size(formula, delta, c0,
                                               recommend_params_from_json(json::parse(params)));
          return to_json(r).dump();
        },
        py::arg("formula"), py::arg("delta"), py::arg("c0"), py::arg("params"));

  m.def("width_subspace_mc",
        [](const Matrix& a, int samples, std::uint64_t seed) {
          const auto w = sketchls::width_subspace_mc(a, samples, seed);
          return py::make_tuple(w.value, w.std_error);
        },
        py::arg("a"), py::arg("samples"), py::arg("seed") = 0);

  m.def("restricted_eig",
        [](const Matrix& a, Index k, bool brute_force) {
          ReOptions opts;
          if (brute_force) opts.method = ReMethod::BruteForceSupports;
          const auto re = sketchls::restricted_eig(a, k, ReMode::Both, opts);
          return py::make_tuple(re.gamma_minus, re.gamma_plus);
        },
        py::arg("a"), py::arg("k"), py::arg("brute_force") = false);

  m.def("certificate_subspace",
        [](const Matrix& a, const Vector& y, const Vector& xstar, const std::string& kind, Index rows,
           std::uint64_t seed) {
          const auto c = sketchls::certificate_subspace(a, y, xstar, make_op(kind, rows, seed, a.rows()));
          return to_json(c).dump();
        },
        py::arg("a"), py::arg("y"), py::arg("xstar"), py::arg("kind"), py::arg("m"),
        py::arg("seed"));

  m.def("run_experiment",
        [](const std::string& config, bool include_timings) {
          const auto cfg = experiment_config_from_json(json::parse(config));
          std::vector<TrialRecord> records;
          {
            py::gil_scoped_release release;
            records = sketchls::run_experiment(cfg);
          }
          return format_csv(records, include_timings);
        },
        py::arg("config"), py::arg("include_timings") = false);
}

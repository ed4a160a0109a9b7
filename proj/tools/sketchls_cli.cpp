#include "sketchls/geometry.hpp"
#include "sketchls/harness.hpp"
#include "sketchls/matrix_io.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/solve.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sketchls;
using nlohmann::json;

namespace {

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  return json::parse(in);
}

// Inline JSON text, or a path to a JSON file.
json json_arg(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) return json::parse(text);
  return load_json(text);
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error(out + ": cannot open for writing");
  f << j.dump(2) << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// {"a": path, "y": path, "constraint": {...}, "solver": {...}}; matrix paths
// are relative to the JSON file.
struct ProblemFile {
  Problem problem;
  SolverOptions solver;
};

ProblemFile load_problem(const fs::path& path) {
  const json j = load_json(path);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  Matrix a = io::read_matrix(resolve(j.at("a").get<std::string>()));
  Vector y = io::read_vector(resolve(j.at("y").get<std::string>()));
  ConstraintSpec c = j.contains("constraint") ? constraint_from_json(j["constraint"])
                                              : ConstraintSpec{Unconstrained{}};
  ProblemFile pf{make_problem(std::move(a), std::move(y), std::move(c)), {}};
  if (j.contains("solver")) pf.solver = solver_options_from_json(j["solver"]);
  return pf;
}

json solution_json(const Solution& s) {
  return {{"x", std::vector<double>(s.x.data(), s.x.data() + s.x.size())},
          {"objective", s.objective},
          {"iterations", s.iterations},
          {"feasibility_gap", s.feasibility_gap},
          {"converged", s.converged}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched constrained least squares"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out;

  // sketch
  auto* sk = app.add_subcommand("sketch", "Build a sketch and apply it to a matrix file");
  std::string sk_in, sk_spec, sk_kind = "gaussian";
  Index sk_m = 0;
  bool sk_dense = false;
  sk->add_option("--in", sk_in, "Input matrix (.csv or .bin)")->required();
  sk->add_option("--spec", sk_spec, "SketchSpec JSON (file or inline)");
  sk->add_option("--kind", sk_kind, "gaussian, rademacher or ros");
  sk->add_option("--m", sk_m, "Sketch rows");
  sk->add_option("--seed", seed, "Sketch seed");
  sk->add_flag("--dense", sk_dense, "Write S itself instead of S * input");
  sk->add_option("--out", out, "Output matrix path")->required();

  // solve
  auto* so = app.add_subcommand("solve", "Solve a problem given as JSON plus matrix files");
  std::string so_problem;
  so->add_option("problem", so_problem, "Problem JSON")->required();
  so->add_option("--out", out, "Solution JSON (default stdout)");

  // recommend
  auto* re = app.add_subcommand("recommend", "Recommended sketch size with its term breakdown");
  std::string re_formula, re_params = "{}";
  double re_delta = 1.0, re_c0 = 1.0;
  re->add_option("formula", re_formula,
                 "thm1, cor2a, cor2b, cor3a, cor3b, cor4a, cor4b, cor5, cor6a, cor6b, cor7")
      ->required();
  re->add_option("--params", re_params, "Parameter JSON (file or inline)");
  re->add_option("--delta", re_delta, "Target delta");
  re->add_option("--c0", re_c0, "Constant multiplier");
  re->add_option("--out", out, "Output JSON (default stdout)");

  // width
  auto* wi = app.add_subcommand("width", "Gaussian width estimates and bounds");
  std::string wi_method, wi_matrix, wi_weights, wi_groups;
  int wi_samples = 400;
  Index wi_k = 1, wi_rank = 1, wi_d1 = 0, wi_d2 = 0;
  double wi_gamma = 0.0;
  wi->add_option("method", wi_method, "subspace_mc, l1_bound, nuclear_bound, group_bound")
      ->required();
  wi->add_option("--matrix", wi_matrix, "Design matrix file");
  wi->add_option("--samples", wi_samples, "Monte-Carlo samples");
  wi->add_option("--seed", seed, "Monte-Carlo seed");
  wi->add_option("--k", wi_k, "Sparsity or number of active groups");
  wi->add_option("--gamma-minus", wi_gamma, "Lower restricted eigenvalue (estimated when 0)");
  wi->add_option("--weights", wi_weights, "Column weights file (nuclear_bound)");
  wi->add_option("--rank", wi_rank, "Rank (nuclear_bound)");
  wi->add_option("--d1", wi_d1, "Rows of the matrix variable");
  wi->add_option("--d2", wi_d2, "Columns of the matrix variable");
  wi->add_option("--groups", wi_groups, "Groups JSON (file or inline)");
  wi->add_option("--out", out, "Output JSON (default stdout)");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run an experiment, write CSV, summary and SVG");
  std::string ex_config, ex_alpha, ex_kinds, ex_name;
  int ex_trials = 0;
  int ex_workers = -1;
  bool ex_no_timings = false;
  ex->add_option("--config", ex_config, "ExperimentConfig JSON (file or inline)");
  ex->add_option("--experiment", ex_name, "unc_ls, lasso, svm, cs or nuclear");
  ex->add_option("--seed", seed, "Master seed");
  ex->add_option("--trials", ex_trials, "Trials per grid point");
  ex->add_option("--alpha-grid", ex_alpha, "Comma-separated alpha values");
  ex->add_option("--kinds", ex_kinds, "Comma-separated sketch kinds");
  ex->add_option("--workers", ex_workers, "Worker threads (0 = all cores)");
  ex->add_flag("--no-timings", ex_no_timings, "Omit timing columns (byte-stable output)");
  ex->add_option("--out", out, "Output directory")->required();

  // certify
  auto* ce = app.add_subcommand("certify", "Per-instance certificate for a sketch");
  std::string ce_problem, ce_spec;
  int ce_directions = 200;
  ce->add_option("problem", ce_problem, "Problem JSON")->required();
  ce->add_option("--sketch", ce_spec, "SketchSpec JSON (file or inline)")->required();
  ce->add_option("--directions", ce_directions, "Sampled cone directions (constrained case)");
  ce->add_option("--seed", seed, "Direction sampling seed");
  ce->add_option("--out", out, "Output JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sk) {
      const Matrix in = io::read_matrix(sk_in);
      SketchSpec spec;
      if (!sk_spec.empty()) {
        spec = sketch_spec_from_json(json_arg(sk_spec));
      } else {
        if (sk_m < 1) throw std::invalid_argument("sketch: --m or --spec is required");
        spec = {sketch_kind_from_string(sk_kind), sk_m, seed};
      }
      const auto op = SketchOperator::build(spec, in.rows());
      io::write_matrix(out, sk_dense ? op.dense() : op.apply(in));
    } else if (*so) {
      const auto pf = load_problem(so_problem);
      emit(solution_json(solve(pf.problem, pf.solver)), out);
    } else if (*re) {
      const auto params = recommend_params_from_json(json_arg(re_params));
      emit(to_json(recommend_sketch_size(re_formula, re_delta, re_c0, params)), out);
    } else if (*wi) {
      WidthEstimate w;
      auto need_matrix = [&] {
        if (wi_matrix.empty()) throw std::invalid_argument("width: --matrix is required");
        return io::read_matrix(wi_matrix);
      };
      if (wi_method == "subspace_mc") {
        w = width_subspace_mc(need_matrix(), wi_samples, seed);
      } else if (wi_method == "l1_bound") {
        const Matrix a = need_matrix();
        ReEstimate re_est;
        re_est.gamma_minus = wi_gamma > 0 ? wi_gamma : restricted_eig(a, wi_k, ReMode::Min).gamma_minus;
        w = width_bound_l1(a, wi_k, re_est);
      } else if (wi_method == "nuclear_bound") {
        if (wi_weights.empty()) throw std::invalid_argument("width: --weights is required");
        w = width_bound_nuclear(io::read_vector(wi_weights), wi_rank, wi_d1, wi_d2);
      } else if (wi_method == "group_bound") {
        const Matrix a = need_matrix();
        if (wi_groups.empty()) throw std::invalid_argument("width: --groups is required");
        const auto groups = json_arg(wi_groups).get<Groups>();
        const double gm = wi_gamma > 0 ? wi_gamma : restricted_eig(a, wi_k, ReMode::Min).gamma_minus;
        w = width_bound_group(a, groups, wi_k, gm);
      } else {
        throw std::invalid_argument("width: unknown method '" + wi_method + "'");
      }
      emit(to_json(w), out);
    } else if (*ex) {
      ExperimentConfig cfg = ex_config.empty() ? ExperimentConfig{}
                                               : experiment_config_from_json(json_arg(ex_config));
      if (!ex_name.empty()) cfg.experiment = experiment_kind_from_string(ex_name);
      if (ex->count("--seed")) cfg.seed = seed;
      if (ex_trials > 0) cfg.trials = ex_trials;
      if (ex_workers >= 0) cfg.workers = ex_workers;
      if (!ex_alpha.empty()) {
        cfg.alphas.clear();
        for (const auto& a : split_list(ex_alpha)) cfg.alphas.push_back(std::stod(a));
      }
      if (!ex_kinds.empty()) {
        cfg.kinds.clear();
        for (const auto& k : split_list(ex_kinds)) cfg.kinds.push_back(sketch_kind_from_string(k));
      }
      // revalidate after overrides
      cfg = experiment_config_from_json(to_json(cfg));
      const auto records = run_experiment(cfg);
      const fs::path dir(out);
      fs::create_directories(dir);
      export_csv(records, dir / "records.csv", !ex_no_timings);
      const auto rows = export_summary(records);
      write_summary_csv(rows, dir / "summary.csv");
      write_svg(rows, dir / "ratio.svg", to_string(cfg.experiment));
      std::ofstream(dir / "config.json") << to_json(cfg).dump(2) << '\n';
      std::cout << "wrote " << records.size() << " records to " << dir.string() << '\n';
    } else if (*ce) {
      const auto pf = load_problem(ce_problem);
      const auto& p = pf.problem;
      const auto spec = sketch_spec_from_json(json_arg(ce_spec));
      const auto op = SketchOperator::build(spec, p.rows());
      const auto star = solve(p, pf.solver);
      Certificate cert;
      if (std::holds_alternative<Unconstrained>(p.constraint)) {
        cert = certificate_subspace(p.a, p.y, star.x, op);
      } else {
        const auto dirs = tangent_cone_sample(p, star.x, ce_directions, seed);
        cert = certificate_sampled(p, star.x, op, dirs);
      }
      json j = to_json(cert);
      j["f_star"] = star.objective;
      j["f_hat"] = objective(p, solve(sketch_problem(p, op), pf.solver).x);
      j["sketch"] = to_json(spec);
      emit(j, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

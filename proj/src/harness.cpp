#include "sketchls/harness.hpp"

#include "sketchls/geometry.hpp"
#include "sketchls/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sketchls {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags for the generators.
constexpr std::uint64_t kStreamDesign = 1;
constexpr std::uint64_t kStreamSignal = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamSupport = 4;
constexpr std::uint64_t kStreamWeights = 5;
constexpr std::uint64_t kInstanceTag = 0x1257a9ceULL;
constexpr std::uint64_t kCertTag = 0xce27ULL;

Matrix gaussian_matrix(Index rows, Index cols, CounterRng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

Vector gaussian_vector(Index n, CounterRng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// First k entries of a Fisher-Yates shuffle of 0..n-1.
std::vector<Index> random_support(Index n, Index k, CounterRng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Vector sparse_signs(Index d, Index k, std::uint64_t seed) {
  if (k < 1 || k > d) throw std::invalid_argument("sparsity must lie in [1, d]");
  CounterRng supp(seed, kStreamSupport);
  CounterRng sig(seed, kStreamSignal);
  Vector x = Vector::Zero(d);
  for (Index i : random_support(d, k, supp)) x[i] = sig.sign();
  return x;
}

double default_c0(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::UncLs: return 1.5;
    case ExperimentKind::Lasso: return 4.0;
    case ExperimentKind::Svm: return 5.0;
    case ExperimentKind::Cs: return 4.0;
    case ExperimentKind::Nuclear: return 1.0;
  }
  return 1.0;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.kinds.empty()) throw std::invalid_argument("experiment: kinds must be non-empty");
  if (cfg.alphas.empty()) throw std::invalid_argument("experiment: alpha grid must be non-empty");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a <= 1.0))
      throw std::invalid_argument("experiment: alpha values must lie in (0, 1]");
  if (cfg.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (!(cfg.noise_nu >= 0.0) || !std::isfinite(cfg.noise_nu))
    throw std::invalid_argument("experiment: noise_nu must be finite and >= 0");
  if (cfg.radius && !(*cfg.radius > 0.0))
    throw std::invalid_argument("experiment: radius must be positive");
  if (cfg.c0 && !(*cfg.c0 > 0.0)) throw std::invalid_argument("experiment: c0 must be positive");
  if (cfg.d < 1 || cfg.n < 1) throw std::invalid_argument("experiment: n and d must be >= 1");
  if (cfg.certify_directions < 0)
    throw std::invalid_argument("experiment: certify_directions must be >= 0");
}

// Everything shared by the trials of one generated instance.
struct Prepared {
  Problem problem;
  Vector truth;  // x0 / x_bar / planted matrix
  Solution star;
  double k = 0.0;  // size parameter entering the m formula
  double log_d = 0.0;
};

Prepared prepare(const ExperimentConfig& cfg, int trial) {
  const std::uint64_t seed =
      mix_seed({cfg.seed, kInstanceTag, static_cast<std::uint64_t>(trial)});
  Prepared out;
  switch (cfg.experiment) {
    case ExperimentKind::UncLs: {
      auto g = gen_gaussian_regression(cfg.n, cfg.d, cfg.noise_nu, seed);
      out.problem = std::move(g.problem);
      out.truth = std::move(g.x0);
      break;
    }
    case ExperimentKind::Lasso: {
      const Index kp = cfg.sparsity.value_or(std::max<Index>(1, cfg.d / 10));
      auto g = gen_sparse_regression(cfg.n, cfg.d, kp, cfg.noise_nu, cfg.radius.value_or(10.0),
                                     seed);
      out.problem = std::move(g.problem);
      out.truth = std::move(g.x0);
      break;
    }
    case ExperimentKind::Svm: {
      auto data = gen_gmm_classification(cfg.d, cfg.features, seed);
      out.problem = build_svm_dual(data.samples, data.labels, cfg.svm_c);
      out.truth = Vector();
      break;
    }
    case ExperimentKind::Cs: {
      auto g = gen_sparse_denoising(cfg.d, cfg.sparsity.value_or(5), cfg.noise_nu, cfg.radius,
                                    seed);
      out.problem = std::move(g.problem);
      out.truth = std::move(g.x0);
      break;
    }
    case ExperimentKind::Nuclear: {
      auto g = gen_weighted_lowrank(cfg.d1, cfg.d2, cfg.rank, cfg.weight_ratio, cfg.noise_nu,
                                    cfg.radius, seed);
      out.problem = std::move(g.problem);
      out.truth = std::move(g.x0);
      break;
    }
  }
  out.star = solve(out.problem, cfg.solver);
  out.log_d = std::log(static_cast<double>(out.problem.cols()));
  switch (cfg.experiment) {
    case ExperimentKind::UncLs: out.k = static_cast<double>(out.problem.cols()); break;
    case ExperimentKind::Lasso:
    case ExperimentKind::Svm:
      out.k = static_cast<double>(std::max<Index>(1, support_size(out.star.x)));
      break;
    case ExperimentKind::Cs: out.k = static_cast<double>(cfg.sparsity.value_or(5)); break;
    case ExperimentKind::Nuclear: {
      // kappa^2 r (d1 + d2), weights read back off the block-diagonal design
      const auto& a = out.problem.a;
      double wmin = std::numeric_limits<double>::infinity();
      double wmax = 0.0;
      for (Index j = 0; j < cfg.d2; ++j) {
        const double w = a(j * cfg.d1, j * cfg.d1);
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
      }
      const double kappa = wmax / wmin;
      out.k = kappa * kappa * static_cast<double>(cfg.rank) *
              static_cast<double>(cfg.d1 + cfg.d2);
      break;
    }
  }
  return out;
}

Index sketch_rows(const ExperimentConfig& cfg, const Prepared& prep, double alpha) {
  const double c0 = cfg.c0.value_or(default_c0(cfg.experiment));
  double m = 0.0;
  switch (cfg.experiment) {
    case ExperimentKind::UncLs:
    case ExperimentKind::Nuclear: m = c0 * alpha * prep.k; break;
    case ExperimentKind::Lasso:
    case ExperimentKind::Svm:
    case ExperimentKind::Cs: m = c0 * alpha * prep.k * prep.log_d; break;
  }
  return std::max<Index>(1, ceil_count(m));
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Runs fn(i) for i in [0, count) on `workers` threads, rethrowing the first
// exception.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  std::size_t nthreads = workers > 0 ? static_cast<std::size_t>(workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_num(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

const std::vector<std::string> kColumns{
    "experiment", "kind",  "n",     "d",     "m",     "alpha",
    "trial",      "f_star", "f_hat", "ratio", "recovery_error_inf",
    "cert_bound", "converged", "sketch_ms", "solve_ms"};

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::UncLs: return "unc_ls";
    case ExperimentKind::Lasso: return "lasso";
    case ExperimentKind::Svm: return "svm";
    case ExperimentKind::Cs: return "cs";
    case ExperimentKind::Nuclear: return "nuclear";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::UncLs, ExperimentKind::Lasso, ExperimentKind::Svm,
                 ExperimentKind::Cs, ExperimentKind::Nuclear})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json kinds = nlohmann::json::array();
  for (auto k : cfg.kinds) kinds.push_back(to_string(k));
  nlohmann::json j{{"experiment", to_string(cfg.experiment)},
                   {"n", cfg.n},
                   {"d", cfg.d},
                   {"d1", cfg.d1},
                   {"d2", cfg.d2},
                   {"kinds", kinds},
                   {"alpha_grid", cfg.alphas},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"noise_nu", cfg.noise_nu},
                   {"rank", cfg.rank},
                   {"weight_ratio", cfg.weight_ratio},
                   {"svm_c", cfg.svm_c},
                   {"features", cfg.features},
                   {"certify", cfg.certify},
                   {"certify_directions", cfg.certify_directions},
                   {"solver", to_json(cfg.solver)},
                   {"workers", cfg.workers}};
  j["radius"] = cfg.radius ? nlohmann::json(*cfg.radius) : nlohmann::json(nullptr);
  j["c0"] = cfg.c0 ? nlohmann::json(*cfg.c0) : nlohmann::json(nullptr);
  j["sparsity"] = cfg.sparsity ? nlohmann::json(*cfg.sparsity) : nlohmann::json(nullptr);
  return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("ExperimentConfig must be a JSON object");
  static const std::vector<std::string> known{
      "experiment", "n",        "d",        "d1",           "d2",       "kinds",
      "alpha_grid", "trials",   "seed",     "noise_nu",     "radius",   "c0",
      "sparsity",   "rank",     "weight_ratio", "svm_c",    "features", "certify",
      "certify_directions",     "solver",   "workers"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("ExperimentConfig: unknown key '" + key + "'");

  ExperimentConfig cfg;
  try {
    if (j.contains("experiment"))
      cfg.experiment = experiment_kind_from_string(j["experiment"].get<std::string>());
    if (j.contains("n")) cfg.n = j["n"].get<Index>();
    if (j.contains("d")) cfg.d = j["d"].get<Index>();
    if (j.contains("d1")) cfg.d1 = j["d1"].get<Index>();
    if (j.contains("d2")) cfg.d2 = j["d2"].get<Index>();
    if (j.contains("kinds")) {
      cfg.kinds.clear();
      for (const auto& k : j["kinds"]) cfg.kinds.push_back(sketch_kind_from_string(k.get<std::string>()));
    }
    if (j.contains("alpha_grid")) cfg.alphas = j["alpha_grid"].get<std::vector<double>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("noise_nu")) cfg.noise_nu = j["noise_nu"].get<double>();
    if (j.contains("radius") && !j["radius"].is_null()) cfg.radius = j["radius"].get<double>();
    if (j.contains("c0") && !j["c0"].is_null()) cfg.c0 = j["c0"].get<double>();
    if (j.contains("sparsity") && !j["sparsity"].is_null())
      cfg.sparsity = j["sparsity"].get<Index>();
    if (j.contains("rank")) cfg.rank = j["rank"].get<Index>();
    if (j.contains("weight_ratio")) cfg.weight_ratio = j["weight_ratio"].get<double>();
    if (j.contains("svm_c")) cfg.svm_c = j["svm_c"].get<double>();
    if (j.contains("features")) cfg.features = j["features"].get<Index>();
    if (j.contains("certify")) cfg.certify = j["certify"].get<bool>();
    if (j.contains("certify_directions"))
      cfg.certify_directions = j["certify_directions"].get<int>();
    if (j.contains("solver")) cfg.solver = solver_options_from_json(j["solver"]);
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("ExperimentConfig: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

GeneratedInstance gen_gaussian_regression(Index n, Index d, double nu, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("gen_gaussian_regression: empty dimensions");
  CounterRng design(seed, kStreamDesign);
  CounterRng signal(seed, kStreamSignal);
  CounterRng noise(seed, kStreamNoise);
  Matrix a = gaussian_matrix(n, d, design);
  Vector x0 = gaussian_vector(d, signal);
  x0.normalize();
  Vector y = a * x0 + nu * gaussian_vector(n, noise);
  return {make_problem(std::move(a), std::move(y), Unconstrained{}), std::move(x0)};
}

GeneratedInstance gen_sparse_regression(Index n, Index d, Index k_prime, double nu, double radius,
                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_sparse_regression: n must be >= 1");
  CounterRng design(seed, kStreamDesign);
  CounterRng noise(seed, kStreamNoise);
  Matrix a = gaussian_matrix(n, d, design);
  Vector x0 = sparse_signs(d, k_prime, seed);
  Vector y = a * x0 + nu * gaussian_vector(n, noise);
  return {make_problem(std::move(a), std::move(y), L1Ball{radius}), std::move(x0)};
}

GeneratedInstance gen_sparse_denoising(Index d, Index k, double nu, std::optional<double> radius,
                                       std::uint64_t seed) {
  CounterRng noise(seed, kStreamNoise);
  Vector xbar = sparse_signs(d, k, seed);
  Vector y = xbar + nu * gaussian_vector(d, noise);
  const double r = radius.value_or(l1_norm(xbar));
  return {make_problem(Matrix::Identity(d, d), std::move(y), L1Ball{r}), std::move(xbar)};
}

ClassificationData gen_gmm_classification(Index count, Index features, std::uint64_t seed) {
  if (count < 2) throw std::invalid_argument("gen_gmm_classification: count must be >= 2");
  if (features < 1) throw std::invalid_argument("gen_gmm_classification: features must be >= 1");
  CounterRng means_rng(seed, kStreamSignal);
  CounterRng label_rng(seed, kStreamSupport);
  CounterRng noise(seed, kStreamNoise);
  ClassificationData out;
  out.means.resize(features, 2);
  for (Index c = 0; c < 2; ++c)
    for (Index i = 0; i < features; ++i) out.means(i, c) = -3.0 + 6.0 * means_rng.uniform();
  out.samples.resize(features, count);
  out.labels.resize(count);
  for (Index s = 0; s < count; ++s) {
    const double z = label_rng.sign();
    out.labels[s] = z;
    const Index c = z > 0 ? 1 : 0;
    for (Index i = 0; i < features; ++i) out.samples(i, s) = out.means(i, c) + noise.normal();
  }
  return out;
}

GeneratedInstance gen_weighted_lowrank(Index d1, Index d2, Index rank, double weight_ratio,
                                       double nu, std::optional<double> radius,
                                       std::uint64_t seed) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("gen_weighted_lowrank: empty dimensions");
  if (rank < 1 || rank > std::min(d1, d2))
    throw std::invalid_argument("gen_weighted_lowrank: rank must lie in [1, min(d1, d2)]");
  if (!(weight_ratio >= 1.0))
    throw std::invalid_argument("gen_weighted_lowrank: weight_ratio must be >= 1");
  CounterRng signal(seed, kStreamSignal);
  CounterRng noise(seed, kStreamNoise);
  CounterRng wrng(seed, kStreamWeights);
  const Matrix u = gaussian_matrix(d1, rank, signal);
  const Matrix v = gaussian_matrix(d2, rank, signal);
  const Matrix planted = u * v.transpose() / std::sqrt(static_cast<double>(rank));
  const Matrix z = planted + nu * gaussian_matrix(d1, d2, noise);
  Vector w(d2);
  for (Index j = 0; j < d2; ++j) w[j] = 1.0 + (weight_ratio - 1.0) * wrng.uniform();
  const double r = radius.value_or(0.8 * nuclear_norm(planted));
  Vector x0 = Eigen::Map<const Vector>(planted.data(), planted.size());
  return {build_weighted_lowrank(z, w, r), std::move(x0)};
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<Prepared> prepared(trials);
  parallel_for(trials, cfg.workers,
               [&](std::size_t t) { prepared[t] = prepare(cfg, static_cast<int>(t)); });

  const std::size_t per_kind = cfg.alphas.size() * trials;
  std::vector<TrialRecord> records(cfg.kinds.size() * per_kind);
  parallel_for(records.size(), cfg.workers, [&](std::size_t slot) {
    const std::size_t ki = slot / per_kind;
    const std::size_t ai = (slot % per_kind) / trials;
    const std::size_t t = slot % trials;
    const Prepared& prep = prepared[t];
    const Problem& p = prep.problem;
    const double alpha = cfg.alphas[ai];

    TrialRecord rec;
    rec.experiment = to_string(cfg.experiment);
    rec.kind = to_string(cfg.kinds[ki]);
    rec.n = p.rows();
    rec.d = p.cols();
    rec.m = sketch_rows(cfg, prep, alpha);
    rec.alpha = alpha;
    rec.trial = static_cast<int>(t);

    const SketchSpec spec{cfg.kinds[ki], rec.m,
                          mix_seed({cfg.seed, static_cast<std::uint64_t>(cfg.kinds[ki]),
                                    static_cast<std::uint64_t>(ai), static_cast<std::uint64_t>(t)})};
    auto t0 = std::chrono::steady_clock::now();
    const auto op = SketchOperator::build(spec, p.rows());
    const Problem sketched = sketch_problem(p, op);
    rec.sketch_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    const Solution hat = solve(sketched, cfg.solver);
    rec.solve_ms = elapsed_ms(t0);

    rec.f_star = prep.star.objective;
    rec.f_hat = objective(p, hat.x);
    rec.ratio = rec.f_star > 0.0 ? rec.f_hat / rec.f_star : kNaN;
    rec.recovery_error_inf =
        cfg.experiment == ExperimentKind::Cs ? (hat.x - prep.truth).cwiseAbs().maxCoeff() : kNaN;
    rec.converged = hat.converged && prep.star.converged;
    rec.cert_bound = kNaN;
    if (cfg.certify) {
      try {
        if (cfg.experiment == ExperimentKind::UncLs) {
          rec.cert_bound = certificate_subspace(p.a, p.y, prep.star.x, op).bound;
        } else if (cfg.certify_directions > 0) {
          const auto dirs = tangent_cone_sample(
              p, prep.star.x, cfg.certify_directions,
              mix_seed({spec.seed, kCertTag}));
          rec.cert_bound = certificate_sampled(p, prep.star.x, op, dirs).bound;
        }
      } catch (const std::exception&) {
        rec.cert_bound = kNaN;  // e.g. zero residual
      }
    }
    records[slot] = std::move(rec);
  });
  return records;
}

std::string format_csv(const std::vector<TrialRecord>& records, bool include_timings) {
  const std::size_t ncols = include_timings ? kColumns.size() : kColumns.size() - 2;
  std::string out;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (c) out += ',';
    out += kColumns[c];
  }
  out += '\n';
  for (const auto& r : records) {
    out += r.experiment + ',' + r.kind + ',' + std::to_string(r.n) + ',' + std::to_string(r.d) +
           ',' + std::to_string(r.m) + ',' + fmt(r.alpha) + ',' + std::to_string(r.trial) + ',' +
           fmt(r.f_star) + ',' + fmt(r.f_hat) + ',' + fmt(r.ratio) + ',' +
           fmt(r.recovery_error_inf) + ',' + fmt(r.cert_bound) + ',' + (r.converged ? "1" : "0");
    if (include_timings) out += ',' + fmt(r.sketch_ms) + ',' + fmt(r.solve_ms);
    out += '\n';
  }
  return out;
}

void export_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path,
                bool include_timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << format_csv(records, include_timings);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header");
  const auto header = split_line(line);
  auto col = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  for (std::size_t c = 0; c + 2 < kColumns.size(); ++c)
    if (col(kColumns[c]) < 0)
      throw std::runtime_error(path.string() + ": missing column '" + kColumns[c] + "'");

  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path.string() + ": row has wrong column count");
    auto cell = [&](const char* name) -> const std::string& {
      return cells[static_cast<std::size_t>(col(name))];
    };
    TrialRecord r;
    r.experiment = cell("experiment");
    r.kind = cell("kind");
    r.n = std::stoll(cell("n"));
    r.d = std::stoll(cell("d"));
    r.m = std::stoll(cell("m"));
    r.alpha = parse_num(cell("alpha"));
    r.trial = std::stoi(cell("trial"));
    r.f_star = parse_num(cell("f_star"));
    r.f_hat = parse_num(cell("f_hat"));
    r.ratio = parse_num(cell("ratio"));
    r.recovery_error_inf = parse_num(cell("recovery_error_inf"));
    r.cert_bound = parse_num(cell("cert_bound"));
    r.converged = cell("converged") == "1";
    if (col("sketch_ms") >= 0) r.sketch_ms = parse_num(cell("sketch_ms"));
    if (col("solve_ms") >= 0) r.solve_ms = parse_num(cell("solve_ms"));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SummaryRow> export_summary(const std::vector<TrialRecord>& records) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<const TrialRecord*>> members;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) {
      return s.kind == r.kind && s.alpha == r.alpha;
    });
    if (it == rows.end()) {
      rows.push_back({r.kind, r.alpha});
      members.emplace_back();
      it = rows.end() - 1;
    }
    members[static_cast<std::size_t>(it - rows.begin())].push_back(&r);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> ratios;
    double err_sum = 0.0;
    int err_count = 0;
    for (const auto* r : members[i]) {
      if (std::isfinite(r->ratio)) ratios.push_back(r->ratio);
      if (std::isfinite(r->recovery_error_inf)) {
        err_sum += r->recovery_error_inf;
        ++err_count;
      }
    }
    auto& row = rows[i];
    row.count = static_cast<int>(ratios.size());
    if (ratios.empty()) {
      row.mean_ratio = kNaN;
      row.stderr_ratio = kNaN;
    } else {
      double sum = 0.0;
      for (double v : ratios) sum += v;
      row.mean_ratio = sum / static_cast<double>(ratios.size());
      double ss = 0.0;
      for (double v : ratios) ss += (v - row.mean_ratio) * (v - row.mean_ratio);
      row.stderr_ratio =
          ratios.size() > 1
              ? std::sqrt(ss / static_cast<double>(ratios.size() - 1) /
                          static_cast<double>(ratios.size()))
              : 0.0;
    }
    row.mean_recovery_error = err_count ? err_sum / err_count : kNaN;
  }
  return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << "kind,alpha,count,mean_ratio,stderr_ratio,mean_recovery_error\n";
  for (const auto& r : rows)
    out << r.kind << ',' << fmt(r.alpha) << ',' << r.count << ',' << fmt(r.mean_ratio) << ','
        << fmt(r.stderr_ratio) << ',' << fmt(r.mean_recovery_error) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_svg(const std::vector<SummaryRow>& rows, const std::filesystem::path& path,
               const std::string& title) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  std::vector<std::string> kinds;
  double amin = 0.0, amax = 1.0, rmin = 1.0, rmax = 1.0;
  bool first = true;
  for (const auto& r : rows) {
    if (std::find(kinds.begin(), kinds.end(), r.kind) == kinds.end()) kinds.push_back(r.kind);
    if (!std::isfinite(r.mean_ratio)) continue;
    if (first) {
      amin = amax = r.alpha;
      rmin = rmax = r.mean_ratio;
      first = false;
    }
    amin = std::min(amin, r.alpha);
    amax = std::max(amax, r.alpha);
    rmin = std::min(rmin, r.mean_ratio);
    rmax = std::max(rmax, r.mean_ratio);
  }
  if (amax <= amin) amax = amin + 1.0;
  rmin = std::min(rmin, 1.0);
  if (rmax <= rmin) rmax = rmin + 1.0;
  auto px = [&](double a) { return L + (a - amin) / (amax - amin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - rmin) / (rmax - rmin) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double a = amin + (amax - amin) * i / 4.0;
    const double v = rmin + (rmax - rmin) * i / 4.0;
    s << "<text x=\"" << px(a) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << fmt(std::round(a * 100) / 100) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
      << fmt(std::round(v * 100) / 100) << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
    << "\" text-anchor=\"middle\">alpha</text>\n"
    << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\" text-anchor=\"middle\">f(x_hat) / f(x*)</text>\n";
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    const char* color = colors[k % 5];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows)
      if (r.kind == kinds[k] && std::isfinite(r.mean_ratio))
        s << px(r.alpha) << ',' << py(r.mean_ratio) << ' ';
    s << "\"/>\n";
    const double ly = T + 20.0 * static_cast<double>(k);
    s << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\""
      << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">" << kinds[k] << "</text>\n";
  }
  s << "</svg>\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << s.str();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

bool ratio_trend_non_increasing(const std::vector<SummaryRow>& rows, const std::string& kind) {
  std::vector<const SummaryRow*> seq;
  for (const auto& r : rows)
    if (r.kind == kind && std::isfinite(r.mean_ratio)) seq.push_back(&r);
  std::sort(seq.begin(), seq.end(),
            [](const SummaryRow* a, const SummaryRow* b) { return a->alpha < b->alpha; });
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const double slack = std::hypot(seq[i]->stderr_ratio, seq[i + 1]->stderr_ratio);
    if (seq[i + 1]->mean_ratio > seq[i]->mean_ratio + slack) return false;
  }
  return true;
}

}  // namespace sketchls

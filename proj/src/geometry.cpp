#include "sketchls/geometry.hpp"

#include "sketchls/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sketchls {
namespace {

WidthEstimate summarize(const std::vector<double>& draws, WidthMethod method) {
  const double n = static_cast<double>(draws.size());
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : draws) var += (v - mean) * (v - mean);
  var = draws.size() > 1 ? var / (n - 1.0) : 0.0;
  return {mean, method, static_cast<int>(draws.size()), std::sqrt(var / n)};
}

Matrix stack_columns(const std::vector<Vector>& dirs) {
  if (dirs.empty()) throw std::invalid_argument("no directions supplied");
  Matrix m(dirs.front().size(), static_cast<Index>(dirs.size()));
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    if (dirs[j].size() != m.rows()) throw std::invalid_argument("directions differ in length");
    m.col(static_cast<Index>(j)) = dirs[j];
  }
  return m;
}

// Unit vector maximizing <v, w> over {||w||_2 = 1, ||w||_1 <= s}: a
// normalized soft-threshold of v, with the level found by bisection.
Vector sphere_l1_project(const Vector& v, double s) {
  auto shrink = [&](double theta) {
    return Vector((v.array().abs() - theta).cwiseMax(0.0) * v.array().sign());
  };
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) {
    Vector e = Vector::Zero(v.size());
    e[0] = 1.0;
    return e;
  }
  Vector w = shrink(0.0);
  if (w.lpNorm<1>() <= s * w.norm()) return w / w.norm();
  double lo = 0.0;
  double hi = vmax;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * vmax; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vector t = shrink(mid);
    const double nrm = t.norm();
    if (nrm > 0.0 && t.lpNorm<1>() <= s * nrm)
      hi = mid;
    else
      lo = mid;
  }
  w = shrink(hi);
  return w / w.norm();
}

double require(const std::optional<double>& v, const char* name, const std::string& formula) {
  if (!v) throw std::invalid_argument(formula + ": missing parameter '" + name + "'");
  return *v;
}

}  // namespace

std::string to_string(WidthMethod m) {
  switch (m) {
    case WidthMethod::SubspaceMc: return "subspace_mc";
    case WidthMethod::L1Bound: return "l1_bound";
    case WidthMethod::NuclearBound: return "nuclear_bound";
    case WidthMethod::GroupBound: return "group_bound";
    case WidthMethod::ConeMcLower: return "cone_mc_lower";
  }
  return "unknown";
}

nlohmann::json to_json(const WidthEstimate& w) {
  return {{"value", w.value},
          {"method", to_string(w.method)},
          {"samples", w.samples},
          {"stderr", w.std_error}};
}

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j{{"z1", c.z1}, {"z2", c.z2}, {"exact", c.exact}};
  if (std::isfinite(c.bound))
    j["bound"] = c.bound;
  else
    j["bound"] = nullptr;
  return j;
}

WidthEstimate width_subspace_mc(const Matrix& a, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("width_subspace_mc: samples must be >= 1");
  if (a.size() == 0 || a.isZero(0.0)) throw std::invalid_argument("width_subspace_mc: A is zero");
  const Matrix q = column_basis(a);
  std::vector<double> draws(static_cast<std::size_t>(samples));
  Vector g(a.rows());
  for (int s = 0; s < samples; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    for (Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
    draws[static_cast<std::size_t>(s)] = (q.transpose() * g).norm();
  }
  return summarize(draws, WidthMethod::SubspaceMc);
}

WidthEstimate width_bound_l1(const Matrix& a, Index k, const ReEstimate& re) {
  if (!(re.gamma_minus > 0.0))
    throw std::invalid_argument("width_bound_l1: gamma_minus must be positive");
  if (k < 1) throw std::invalid_argument("width_bound_l1: k must be >= 1");
  const double d = static_cast<double>(a.cols());
  const double colmax = a.colwise().norm().maxCoeff();
  const double value =
      6.0 * std::sqrt(static_cast<double>(k) * std::log(d)) * colmax / std::sqrt(re.gamma_minus);
  return {value, WidthMethod::L1Bound, 0, 0.0};
}

WidthEstimate width_bound_nuclear(const Vector& weights, Index rank, Index d1, Index d2) {
  if (weights.size() == 0 || (weights.array() <= 0.0).any())
    throw std::invalid_argument("width_bound_nuclear: weights must be positive");
  if (rank < 1) throw std::invalid_argument("width_bound_nuclear: rank must be >= 1");
  const double kappa = weights.maxCoeff() / weights.minCoeff();
  const double value = 2.0 * kappa * std::sqrt(static_cast<double>(rank)) *
                       (std::sqrt(static_cast<double>(d1)) + std::sqrt(static_cast<double>(d2)));
  return {value, WidthMethod::NuclearBound, 0, 0.0};
}

WidthEstimate width_bound_group(const Matrix& a, const Groups& groups, Index k,
                                double gamma_minus) {
  if (!(gamma_minus > 0.0))
    throw std::invalid_argument("width_bound_group: gamma_minus must be positive");
  validate(GroupL1Ball{1.0, groups}, a.cols());
  double opmax = 0.0;
  std::size_t largest = 0;
  for (const auto& g : groups) {
    Matrix sub(a.rows(), static_cast<Index>(g.size()));
    for (std::size_t j = 0; j < g.size(); ++j) sub.col(static_cast<Index>(j)) = a.col(g[j]);
    opmax = std::max(opmax, thin_svd(sub).s[0]);
    largest = std::max(largest, g.size());
  }
  const double kk = static_cast<double>(k);
  const double value = std::sqrt(opmax / gamma_minus *
                                 (kk * std::log(static_cast<double>(groups.size())) +
                                  kk * static_cast<double>(largest)));
  return {value, WidthMethod::GroupBound, 0, 0.0};
}

WidthEstimate width_cone_mc(const std::vector<Vector>& directions, int samples,
                            std::uint64_t seed) {
  const Matrix dirs = stack_columns(directions);
  std::vector<double> draws(static_cast<std::size_t>(samples));
  Vector g(dirs.rows());
  for (int s = 0; s < samples; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    for (Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
    draws[static_cast<std::size_t>(s)] = (dirs.transpose() * g).cwiseAbs().maxCoeff();
  }
  return summarize(draws, WidthMethod::ConeMcLower);
}

WidthEstimate rademacher_width_cone_mc(const std::vector<Vector>& directions, int samples,
                                       std::uint64_t seed) {
  const Matrix dirs = stack_columns(directions);
  std::vector<double> draws(static_cast<std::size_t>(samples));
  Vector eps(dirs.rows());
  for (int s = 0; s < samples; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    for (Index i = 0; i < eps.size(); ++i) eps[i] = rng.sign();
    draws[static_cast<std::size_t>(s)] = (dirs.transpose() * eps).cwiseAbs().maxCoeff();
  }
  return summarize(draws, WidthMethod::ConeMcLower);
}

WidthEstimate sketch_width_cone_mc(const std::vector<Vector>& directions, SketchKind kind,
                                   Index m, int samples, std::uint64_t seed) {
  const Matrix dirs = stack_columns(directions);
  std::vector<double> draws(static_cast<std::size_t>(samples));
  Vector g(m);
  for (int s = 0; s < samples; ++s) {
    const auto op = SketchOperator::build({kind, m, mix_seed({seed, 0x5ce7c4ULL, static_cast<std::uint64_t>(s)})},
                                          dirs.rows());
    const Matrix sd = op.apply(dirs) / std::sqrt(static_cast<double>(m));
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    for (Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
    draws[static_cast<std::size_t>(s)] = (sd.transpose() * g).cwiseAbs().maxCoeff();
  }
  return summarize(draws, WidthMethod::ConeMcLower);
}

Index ros_sketch_size(double c0, double delta, double rademacher_width, double sketch_width,
                      Index n) {
  if (!(delta > 0.0) || !(c0 > 0.0) || n < 1)
    throw std::invalid_argument("ros_sketch_size: c0, delta, n must be positive");
  const double rhs = c0 / (delta * delta) *
                     (rademacher_width * rademacher_width + std::log(static_cast<double>(n))) *
                     sketch_width * sketch_width;
  auto ok = [&](Index m) {
    const double md = static_cast<double>(m);
    return md / std::log(md) > rhs;
  };
  Index hi = 3;
  while (!ok(hi)) hi *= 2;
  Index lo = std::max<Index>(3, hi / 2);
  if (ok(lo)) return lo;
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

ReEstimate restricted_eig(const Matrix& a, Index k, ReMode mode, const ReOptions& opts) {
  const Index d = a.cols();
  if (k < 1 || k > d) throw std::invalid_argument("restricted_eig: k out of range");
  const Matrix gram = a.transpose() * a;
  ReEstimate out;
  out.k = k;
  out.method = opts.method;

  if (opts.method == ReMethod::BruteForceSupports) {
    if (d > 20) throw std::invalid_argument("restricted_eig: brute force needs d <= 20");
    const Index s = std::min<Index>(4 * k, d);
    std::vector<char> mask(static_cast<std::size_t>(d), 0);
    std::fill(mask.begin(), mask.begin() + s, 1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::vector<Index> idx;
    Matrix sub(s, s);
    do {
      idx.clear();
      for (Index i = 0; i < d; ++i)
        if (mask[static_cast<std::size_t>(i)]) idx.push_back(i);
      for (Index r = 0; r < s; ++r)
        for (Index c = 0; c < s; ++c) sub(r, c) = gram(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
      const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(sub, Eigen::EigenvaluesOnly).eigenvalues();
      lo = std::min(lo, ev[0]);
      hi = std::max(hi, ev[s - 1]);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    out.gamma_minus = std::max(0.0, lo);
    out.gamma_plus = hi;
    out.certified = true;
    return out;
  }

  const double radius = 2.0 * std::sqrt(static_cast<double>(k));
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const double shift = eig.eigenvalues()[d - 1] * (1.0 + 1e-9) + 1e-300;

  // Projected power iteration on M (PSD) ascends z^T M z over the feasible set.
  auto ascend = [&](const Matrix& m, const Vector& start) {
    Vector z = sphere_l1_project(start, radius);
    double best = z.dot(m * z);
    for (int it = 0; it < opts.iterations; ++it) {
      const Vector next = sphere_l1_project(m * z, radius);
      const double val = next.dot(m * next);
      if (val <= best * (1.0 + 1e-14)) break;
      z = next;
      best = val;
    }
    return z;
  };

  auto start_vector = [&](int restart, bool want_max) -> Vector {
    if (restart == 0) return eig.eigenvectors().col(want_max ? d - 1 : 0);
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(restart) * 2 + (want_max ? 1 : 0));
    Vector v(d);
    for (Index i = 0; i < d; ++i) v[i] = rng.normal();
    return v;
  };

  if (mode != ReMode::Min) {
    double best = 0.0;
    for (int r = 0; r < opts.restarts; ++r) {
      const Vector z = ascend(gram, start_vector(r, true));
      best = std::max(best, z.dot(gram * z));
    }
    out.gamma_plus = best;
  } else {
    out.gamma_plus = std::numeric_limits<double>::infinity();
  }
  if (mode != ReMode::Max) {
    const Matrix flipped = shift * Matrix::Identity(d, d) - gram;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
      const Vector z = ascend(flipped, start_vector(r, false));
      best = std::min(best, z.dot(gram * z));
    }
    out.gamma_minus = std::max(0.0, best);
  } else {
    out.gamma_minus = 0.0;
  }
  return out;
}

RecommendParams recommend_params_from_json(const nlohmann::json& j) {
  RecommendParams p;
  auto get = [&](const char* key, std::optional<double>& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
  };
  get("width", p.width);
  get("rank", p.rank);
  get("n", p.n);
  get("k", p.k);
  get("d", p.d);
  get("colnorm_max_sq", p.colnorm_max_sq);
  get("gamma_minus", p.gamma_minus);
  get("gamma_plus", p.gamma_plus);
  get("kappa_sq", p.kappa_sq);
  get("r", p.r);
  get("d1", p.d1);
  get("d2", p.d2);
  get("groups", p.groups);
  get("max_group_size", p.max_group_size);
  get("group_opnorm_max", p.group_opnorm_max);
  return p;
}

nlohmann::json to_json(const Recommendation& r) {
  nlohmann::json terms = nlohmann::json::object();
  for (const auto& [name, v] : r.terms) terms[name] = v;
  return {{"formula", r.formula}, {"m", r.m}, {"terms", terms}, {"delta", r.delta}, {"c0", r.c0}};
}

Recommendation recommend_sketch_size(const std::string& formula, double delta, double c0,
                                     const RecommendParams& p) {
  if (!(delta > 0.0) || !(c0 > 0.0))
    throw std::invalid_argument("recommend_sketch_size: delta and c0 must be positive");
  const std::string& f = formula;
  const double scale = c0 / (delta * delta);
  auto log4 = [](double x) { return std::pow(std::log(x), 4.0); };

  Recommendation rec;
  rec.formula = formula;
  rec.delta = delta;
  rec.c0 = c0;
  auto& t = rec.terms;

  if (f == "thm1") {
    const double w = require(p.width, "width", f);
    t["width_term"] = scale * w * w;
  } else if (f == "cor2a") {
    t["rank_term"] = scale * require(p.rank, "rank", f);
  } else if (f == "cor2b") {
    t["rank_term"] = scale * require(p.rank, "rank", f) * log4(require(p.n, "n", f));
  } else if (f == "cor3a" || f == "cor5") {
    const double ratio =
        require(p.colnorm_max_sq, "colnorm_max_sq", f) / require(p.gamma_minus, "gamma_minus", f);
    const double sparse = ratio * require(p.k, "k", f) * std::log(require(p.d, "d", f));
    t[f == "cor5" ? "margin_term" : "sparse_term"] = scale * sparse;
    if (f == "cor3a" && p.rank) t["rank_term"] = scale * *p.rank;
  } else if (f == "cor3b") {
    const double l4 = log4(require(p.n, "n", f));
    const double gm = require(p.gamma_minus, "gamma_minus", f);
    const double klogd = require(p.k, "k", f) * std::log(require(p.d, "d", f));
    const double ratio = require(p.colnorm_max_sq, "colnorm_max_sq", f) / gm;
    t["rademacher_term"] = scale * (ratio * klogd) * (ratio * klogd);
    const double cond = require(p.gamma_plus, "gamma_plus", f) / gm;
    t["re_term"] = scale * l4 * cond * cond * klogd;
    if (p.rank) t["rank_term"] = scale * l4 * *p.rank;
  } else if (f == "cor4a") {
    t["sparse_term"] = scale * require(p.k, "k", f) * std::log(require(p.d, "d", f));
  } else if (f == "cor4b") {
    const double k = require(p.k, "k", f);
    const double logd = std::log(require(p.d, "d", f));
    t["log5_term"] = scale * k * std::pow(logd, 5.0);
    t["k2_term"] = scale * k * k * logd;
  } else if (f == "cor6a" || f == "cor6b") {
    const double d1 = require(p.d1, "d1", f);
    const double d2 = require(p.d2, "d2", f);
    double v = scale * require(p.kappa_sq, "kappa_sq", f) * require(p.r, "r", f) * (d1 + d2);
    if (f == "cor6b") v *= log4(d1 * d2);
    t["lowrank_term"] = v;
  } else if (f == "cor7") {
    const double k = require(p.k, "k", f);
    const double ratio =
        require(p.group_opnorm_max, "group_opnorm_max", f) / require(p.gamma_minus, "gamma_minus", f);
    t["group_term"] = scale * ratio *
                      (k * std::log(require(p.groups, "groups", f)) +
                       k * require(p.max_group_size, "max_group_size", f));
    if (p.rank) t["rank_term"] = scale * *p.rank;
  } else {
    throw std::invalid_argument("recommend_sketch_size: unknown formula '" + formula + "'");
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [name, v] : t) best = std::min(best, v);
  if (!std::isfinite(best)) throw std::invalid_argument(f + ": non-finite recommendation");
  rec.m = std::max<Index>(1, ceil_count(best));
  return rec;
}

Certificate certificate_subspace(const Matrix& a, const Vector& y, const Vector& xstar,
                                 const SketchOperator& op) {
  if (op.cols() != a.rows()) throw std::invalid_argument("certificate: sketch/problem row mismatch");
  const Vector resid = a * xstar - y;
  const double rn = resid.norm();
  if (!(rn > 0.0)) throw std::invalid_argument("certificate: f(x*) = 0, residual direction undefined");
  const Vector u = resid / rn;
  const Matrix basis = column_basis(a);
  const double m = static_cast<double>(op.rows());

  const Matrix su_basis = op.apply(basis);
  const Vector su = op.apply(u);

  Certificate cert;
  if (basis.cols() <= op.rows()) {
    const Vector sv = Eigen::JacobiSVD<Matrix>(su_basis).singularValues();
    const double smin = sv[sv.size() - 1];
    cert.z1 = smin * smin / m;
  }
  cert.z2 = (su_basis.transpose() * su / m - basis.transpose() * u).norm();
  cert.exact = cert.z1 > 0.0;
  cert.bound = cert.z1 > 0.0 ? std::pow(1.0 + 2.0 * cert.z2 / cert.z1, 2.0)
                             : std::numeric_limits<double>::infinity();
  return cert;
}

Certificate certificate_sampled(const Problem& p, const Vector& xstar, const SketchOperator& op,
                                const std::vector<Vector>& directions) {
  if (p.a.isZero(0.0)) throw std::invalid_argument("certificate: A is zero");
  if (directions.empty()) throw std::invalid_argument("certificate: no directions");
  if (op.cols() != p.rows()) throw std::invalid_argument("certificate: sketch/problem row mismatch");
  const Vector resid = p.a * xstar - p.y;
  const double rn = resid.norm();
  if (!(rn > 0.0)) throw std::invalid_argument("certificate: f(x*) = 0, residual direction undefined");
  const Vector u = resid / rn;
  const Matrix dirs = stack_columns(directions);
  const double m = static_cast<double>(op.rows());

  const Matrix sd = op.apply(dirs);
  const Vector su = op.apply(u);
  Certificate cert;
  cert.z1 = sd.colwise().squaredNorm().minCoeff() / m;
  cert.z2 = (sd.transpose() * su / m - dirs.transpose() * u).cwiseAbs().maxCoeff();
  cert.exact = false;
  cert.bound = cert.z1 > 0.0 ? std::pow(1.0 + 2.0 * cert.z2 / cert.z1, 2.0)
                             : std::numeric_limits<double>::infinity();
  return cert;
}

double mutual_info_per_symbol_bound(double m, double n, double gamma_sq) {
  if (!(n >= 1.0) || m < 0.0 || !(gamma_sq > 0.0))
    throw std::invalid_argument("mutual_info_per_symbol_bound: need m >= 0, n >= 1, gamma^2 > 0");
  return m / (2.0 * n) * std::log(2.0 * std::numbers::pi * std::numbers::e * gamma_sq);
}

}  // namespace sketchls

#include "sketchls/model.hpp"

#include "sketchls/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sketchls {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Threshold theta with sum_i max(u_i - theta, 0) = radius, for the sorted
// water-filling rule. Ties in u are broken by index.
double water_level(const Vector& u, double radius) {
  std::vector<Index> order(static_cast<std::size_t>(u.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return u[a] > u[b]; });
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    cum += u[order[j]];
    const double t = (cum - radius) / static_cast<double>(j + 1);
    if (u[order[j]] > t) theta = t;
  }
  return theta;
}

void require_radius(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument(std::string(what) + ": radius must be positive and finite");
}

Matrix as_matrix(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector as_vector(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

// Dirichlet(1, ..., 1) weights of length n.
Vector dirichlet_ones(CounterRng& rng, Index n) {
  Vector w(n);
  for (Index i = 0; i < n; ++i) w[i] = -std::log1p(-rng.uniform());
  return w / w.sum();
}

}  // namespace

std::string kind_name(const ConstraintSpec& c) {
  return std::visit(overloaded{
                        [](const Unconstrained&) { return std::string("unconstrained"); },
                        [](const L1Ball&) { return std::string("l1"); },
                        [](const Simplex&) { return std::string("simplex"); },
                        [](const NuclearBall&) { return std::string("nuclear"); },
                        [](const GroupL1Ball&) { return std::string("group_l1"); },
                    },
                    c);
}

void validate(const ConstraintSpec& c, Index dim) {
  if (dim < 1) throw std::invalid_argument("constraint: dimension must be >= 1");
  std::visit(overloaded{
                 [](const Unconstrained&) {},
                 [](const Simplex&) {},
                 [](const L1Ball& b) { require_radius(b.radius, "l1 ball"); },
                 [&](const NuclearBall& b) {
                   require_radius(b.radius, "nuclear ball");
                   if (b.rows < 1 || b.cols < 1 || b.rows * b.cols != dim)
                     throw std::invalid_argument("nuclear ball: rows*cols must equal dimension");
                 },
                 [&](const GroupL1Ball& b) {
                   require_radius(b.radius, "group l1 ball");
                   std::vector<int> seen(static_cast<std::size_t>(dim), 0);
                   for (const auto& g : b.groups) {
                     if (g.empty()) throw std::invalid_argument("group l1 ball: empty group");
                     for (Index i : g) {
                       if (i < 0 || i >= dim)
                         throw std::invalid_argument("group l1 ball: index out of range");
                       if (seen[static_cast<std::size_t>(i)]++)
                         throw std::invalid_argument("group l1 ball: groups overlap");
                     }
                   }
                   if (std::find(seen.begin(), seen.end(), 0) != seen.end())
                     throw std::invalid_argument("group l1 ball: groups do not cover all coordinates");
                 },
             },
             c);
}

nlohmann::json to_json(const ConstraintSpec& c) {
  nlohmann::json j;
  j["kind"] = kind_name(c);
  std::visit(overloaded{
                 [](const Unconstrained&) {},
                 [](const Simplex&) {},
                 [&](const L1Ball& b) { j["radius"] = b.radius; },
                 [&](const NuclearBall& b) {
                   j["radius"] = b.radius;
                   j["rows"] = b.rows;
                   j["cols"] = b.cols;
                 },
                 [&](const GroupL1Ball& b) {
                   j["radius"] = b.radius;
                   j["groups"] = b.groups;
                 },
             },
             c);
  return j;
}

ConstraintSpec constraint_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "unconstrained") return Unconstrained{};
  if (kind == "simplex") return Simplex{};
  if (kind == "l1") return L1Ball{j.at("radius").get<double>()};
  if (kind == "nuclear")
    return NuclearBall{j.at("radius").get<double>(), j.at("rows").get<Index>(),
                       j.at("cols").get<Index>()};
  if (kind == "group_l1")
    return GroupL1Ball{j.at("radius").get<double>(), j.at("groups").get<Groups>()};
  throw std::invalid_argument("unknown constraint kind '" + kind + "'");
}

Problem make_problem(Matrix a, Vector y, ConstraintSpec constraint) {
  if (a.rows() < 1 || a.cols() < 1) throw std::invalid_argument("problem: empty design");
  if (a.rows() != y.size()) throw std::invalid_argument("problem: A rows != len(y)");
  require_finite(a, "problem design");
  require_finite(y, "problem observations");
  validate(constraint, a.cols());
  return Problem{std::move(a), std::move(y), std::move(constraint)};
}

double objective(const Problem& p, const Vector& x) {
  if (x.size() != p.cols()) throw std::invalid_argument("objective: len(x) != d");
  return (p.a * x - p.y).squaredNorm();
}

double l1_norm(const Vector& v) { return v.lpNorm<1>(); }

double group_norm(const Vector& v, const Groups& groups) {
  double total = 0.0;
  for (const auto& g : groups) {
    double sq = 0.0;
    for (Index i : g) sq += v[i] * v[i];
    total += std::sqrt(sq);
  }
  return total;
}

double nuclear_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
}

Vector project_l1_ball(const Vector& v, double radius) {
  require_radius(radius, "project_l1_ball");
  if (l1_norm(v) <= radius) return v;
  const Vector mag = v.cwiseAbs();
  const double theta = water_level(mag, radius);
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = sign_of(v[i]) * std::max(mag[i] - theta, 0.0);
  return out;
}

Vector project_simplex(const Vector& v) {
  if (v.size() < 1) throw std::invalid_argument("project_simplex: empty vector");
  const double theta = water_level(v, 1.0);
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

Vector project_group_l1_ball(const Vector& v, const Groups& groups, double radius) {
  require_radius(radius, "project_group_l1_ball");
  Vector w(static_cast<Index>(groups.size()));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& idx = groups[g];
    if (idx.size() == 1) {
      w[static_cast<Index>(g)] = std::abs(v[idx[0]]);
    } else {
      double sq = 0.0;
      for (Index i : idx) sq += v[i] * v[i];
      w[static_cast<Index>(g)] = std::sqrt(sq);
    }
  }
  if (w.sum() <= radius) return v;
  const Vector shrunk = project_l1_ball(w, radius);
  Vector out = Vector::Zero(v.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& idx = groups[g];
    const auto gi = static_cast<Index>(g);
    if (idx.size() == 1) {
      out[idx[0]] = sign_of(v[idx[0]]) * shrunk[gi];
    } else if (w[gi] > 0.0) {
      const double scale = shrunk[gi] / w[gi];
      for (Index i : idx) out[i] = v[i] * scale;
    }
  }
  return out;
}

Matrix project_nuclear_ball(const Matrix& m, double radius) {
  require_radius(radius, "project_nuclear_ball");
  require_finite(m, "project_nuclear_ball");
  const SvdResult svd = thin_svd(m);
  if (svd.s.sum() <= radius) return m;
  const Vector s = project_l1_ball(svd.s, radius);
  return svd.u * s.asDiagonal() * svd.v.transpose();
}

Vector project(const ConstraintSpec& c, const Vector& v) {
  return std::visit(
      overloaded{
          [&](const Unconstrained&) -> Vector { return v; },
          [&](const L1Ball& b) -> Vector { return project_l1_ball(v, b.radius); },
          [&](const Simplex&) -> Vector { return project_simplex(v); },
          [&](const GroupL1Ball& b) -> Vector {
            return project_group_l1_ball(v, b.groups, b.radius);
          },
          [&](const NuclearBall& b) -> Vector {
            if (b.rows * b.cols != v.size())
              throw std::invalid_argument("project: nuclear ball shape mismatch");
            return as_vector(project_nuclear_ball(as_matrix(v, b.rows, b.cols), b.radius));
          },
      },
      c);
}

double feasibility_gap(const ConstraintSpec& c, const Vector& x) {
  return std::visit(
      overloaded{
          [&](const Unconstrained&) { return 0.0; },
          [&](const L1Ball& b) { return std::max(0.0, l1_norm(x) - b.radius); },
          [&](const Simplex&) {
            return std::max(std::abs(x.sum() - 1.0), std::max(0.0, -x.minCoeff()));
          },
          [&](const GroupL1Ball& b) { return std::max(0.0, group_norm(x, b.groups) - b.radius); },
          [&](const NuclearBall& b) {
            return std::max(0.0, nuclear_norm(as_matrix(x, b.rows, b.cols)) - b.radius);
          },
      },
      c);
}

Index support_size(const Vector& x, double threshold) {
  return (x.array().abs() >= threshold).count();
}

std::vector<Vector> tangent_cone_sample(const Problem& p, const Vector& xstar, int count,
                                        std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("tangent_cone_sample: count must be >= 1");
  if (xstar.size() != p.cols()) throw std::invalid_argument("tangent_cone_sample: len(xstar) != d");
  if (feasibility_gap(p.constraint, xstar) > 1e-6)
    throw std::invalid_argument("tangent_cone_sample: xstar is not feasible");

  const Index d = p.cols();
  CounterRng rng(seed);
  auto draw = [&]() -> Vector {
    return std::visit(
        overloaded{
            [&](const Unconstrained&) -> Vector {
              Vector x(d);
              for (Index i = 0; i < d; ++i) x[i] = xstar[i] + rng.normal();
              return x;
            },
            [&](const L1Ball& b) -> Vector {
              Vector x = dirichlet_ones(rng, d);
              for (Index i = 0; i < d; ++i) x[i] *= rng.sign();
              return x * (b.radius * rng.uniform());
            },
            [&](const Simplex&) -> Vector { return dirichlet_ones(rng, d); },
            [&](const GroupL1Ball& b) -> Vector {
              const Vector w = dirichlet_ones(rng, static_cast<Index>(b.groups.size()));
              const double r = b.radius * rng.uniform();
              Vector x = Vector::Zero(d);
              for (std::size_t g = 0; g < b.groups.size(); ++g) {
                Vector block(static_cast<Index>(b.groups[g].size()));
                for (Index i = 0; i < block.size(); ++i) block[i] = rng.normal();
                const double bn = block.norm();
                if (bn == 0.0) continue;
                block *= r * w[static_cast<Index>(g)] / bn;
                for (Index i = 0; i < block.size(); ++i) x[b.groups[g][static_cast<std::size_t>(i)]] = block[i];
              }
              return x;
            },
            [&](const NuclearBall& b) -> Vector {
              Matrix g(b.rows, b.cols);
              for (Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
              const double nn = nuclear_norm(g);
              return as_vector(g * (b.radius * rng.uniform() / nn));
            },
        },
        p.constraint);
  };

  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const long budget = 100L * count;
  for (long attempt = 0; attempt < budget && static_cast<int>(out.size()) < count; ++attempt) {
    Vector dir = p.a * (draw() - xstar);
    const double nrm = dir.norm();
    if (!(nrm >= 1e-10)) continue;
    out.push_back(dir / nrm);
  }
  if (static_cast<int>(out.size()) < count)
    throw std::runtime_error("tangent_cone_sample: no non-degenerate feasible directions found");
  return out;
}

}  // namespace sketchls

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sketchls/model.hpp"
#include "sketchls/rng.hpp"

#include <nlohmann/json.hpp>

using namespace sketchls;

namespace {
Vector randn(Index n, CounterRng& rng, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}
}  // namespace

TEST_CASE("l1 projection matches KKT enumeration") {
  CounterRng rng(21);
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(8));
    const Vector v = randn(d, rng, 2.0);
    const double r = 0.1 + 3.0 * rng.uniform();
    CHECK((project_l1_ball(v, r) - oracle::l1_ball_kkt(v, r)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("l1 projection edge cases") {
  Vector v(3);
  v << 0.1, -0.2, 0.3;
  CHECK(project_l1_ball(v, 1.0) == v);
  v << 1.0, 1.0, 1.0;
  Vector out = project_l1_ball(v, 1.0);
  CHECK(out.sum() == doctest::Approx(1.0));
  CHECK(out[0] == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(project_l1_ball(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(project_l1_ball(v, -1.0), std::invalid_argument);
}

TEST_CASE("simplex projection matches KKT enumeration") {
  CounterRng rng(22);
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(8));
    const Vector v = randn(d, rng);
    const Vector x = project_simplex(v);
    CHECK((x - oracle::simplex_kkt(v)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(feasibility_gap(Simplex{}, x) < kFeasibilityTol);
  }
}

TEST_CASE("group projection matches enumeration and l1 on singletons") {
  CounterRng rng(23);
  const Groups groups{{0, 1}, {2}, {3, 4, 5}, {6, 7}};
  Groups singles;
  for (Index i = 0; i < 8; ++i) singles.push_back({i});
  for (int t = 0; t < 50; ++t) {
    const Vector v = randn(8, rng);
    const double r = 0.1 + 3.0 * rng.uniform();
    CHECK((project_group_l1_ball(v, groups, r) - oracle::group_l1_kkt(v, groups, r))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
    CHECK(project_group_l1_ball(v, singles, r) == project_l1_ball(v, r));
  }
}

TEST_CASE("nuclear projection matches the eigen route") {
  CounterRng rng(24);
  for (int t = 0; t < 30; ++t) {
    Matrix m(4, 3);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    const double r = 0.2 + 3.0 * rng.uniform();
    const Matrix p = project_nuclear_ball(m, r);
    CHECK((p - oracle::nuclear_ball_eig(m, r)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(nuclear_norm(p) <= r + 1e-9);
    const Matrix pt = project_nuclear_ball(m.transpose(), r);
    CHECK((pt - p.transpose()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("projections are idempotent") {
  CounterRng rng(25);
  const Vector v = randn(8, rng, 3.0);
  const ConstraintSpec cs[] = {Unconstrained{}, L1Ball{2.0}, Simplex{},
                               GroupL1Ball{1.5, {{0, 1, 2}, {3}, {4, 5, 6, 7}}},
                               NuclearBall{1.0, 4, 2}};
  for (const auto& c : cs) {
    const Vector p = project(c, v);
    CHECK(feasibility_gap(c, p) < kFeasibilityTol);
    CHECK((project(c, p) - p).norm() < 1e-10);
  }
}

TEST_CASE("constraint validation and json") {
  CHECK_THROWS_AS(validate(L1Ball{0.0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate(NuclearBall{1.0, 2, 2}, 5), std::invalid_argument);
  CHECK_THROWS_AS(validate(GroupL1Ball{1.0, {{0, 1}, {1, 2}}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate(GroupL1Ball{1.0, {{0}, {2}}}, 3), std::invalid_argument);
  CHECK_NOTHROW(validate(GroupL1Ball{1.0, {{0, 2}, {1}}}, 3));
  const ConstraintSpec cs[] = {Unconstrained{}, L1Ball{2.5}, Simplex{}, NuclearBall{1.0, 4, 2},
                               GroupL1Ball{1.5, {{0, 1}, {2}}}};
  for (const auto& c : cs) {
    const auto j = to_json(c);
    CHECK(to_json(constraint_from_json(j)) == j);
    CHECK(j["kind"] == kind_name(c));
  }
  CHECK_THROWS_AS(constraint_from_json(nlohmann::json{{"kind", "box"}}), std::invalid_argument);
}

TEST_CASE("make_problem and objective") {
  CounterRng rng(26);
  Matrix a(5, 3);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  const Vector y = randn(5, rng);
  const Vector x = randn(3, rng);
  const auto p = make_problem(a, y, Unconstrained{});
  CHECK(objective(p, x) == doctest::Approx(oracle::naive_objective(a, y, x)).epsilon(1e-12));
  CHECK_THROWS_AS(make_problem(a, Vector::Ones(4), Unconstrained{}), std::invalid_argument);
  Matrix bad = a;
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(make_problem(bad, y, Unconstrained{}), std::invalid_argument);
  CHECK(support_size(Vector::Zero(4)) == 0);
}

TEST_CASE("tangent cone samples are feasible unit directions") {
  CounterRng rng(27);
  Matrix a(12, 6);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  const Vector y = randn(12, rng);
  const ConstraintSpec cs[] = {Unconstrained{}, L1Ball{1.0}, Simplex{},
                               GroupL1Ball{1.0, {{0, 1}, {2, 3}, {4, 5}}},
                               NuclearBall{1.0, 3, 2}};
  for (const auto& c : cs) {
    const auto p = make_problem(a, y, c);
    const Vector xstar = project(c, Vector::Constant(6, 0.1));
    const auto dirs = tangent_cone_sample(p, xstar, 20, 5);
    CHECK(dirs.size() == 20);
    for (const auto& v : dirs) CHECK(v.norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(tangent_cone_sample(make_problem(a, y, Simplex{}), Vector::Zero(5), 3, 1),
                  std::invalid_argument);
}

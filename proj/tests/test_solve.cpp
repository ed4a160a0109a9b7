#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/solve.hpp"

#include <nlohmann/json.hpp>

using namespace sketchls;

namespace {
Matrix randn(Index r, Index c, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}
}  // namespace

TEST_CASE("unconstrained matches normal equations") {
  const Matrix a = randn(40, 6, 41);
  const Vector y = randn(40, 1, 42).col(0);
  const auto sol = solve(make_problem(a, y, Unconstrained{}));
  CHECK((sol.x - oracle::normal_equations(a, y)).norm() < 1e-10);
  CHECK(sol.objective == doctest::Approx(oracle::naive_objective(a, y, sol.x)).epsilon(1e-12));
  CHECK(sol.converged);
}

TEST_CASE("unconstrained underdetermined gives minimum norm") {
  const Matrix a = randn(3, 6, 43);
  const Vector y = randn(3, 1, 44).col(0);
  const auto sol = solve_unconstrained(a, y);
  const Vector mn = a.transpose() * (a * a.transpose()).ldlt().solve(y);
  CHECK((sol.x - mn).norm() < 1e-10);
  CHECK(sol.objective < 1e-20);
}

TEST_CASE("projected gradient with unconstrained set matches QR") {
  const Matrix a = randn(30, 5, 45);
  const Vector y = randn(30, 1, 46).col(0);
  const auto pg = solve_projected_gradient(a, y, Unconstrained{});
  CHECK((pg.x - oracle::normal_equations(a, y)).norm() < 1e-6);
}

TEST_CASE("l1 solution is feasible and satisfies the variational inequality") {
  const Matrix a = randn(50, 10, 47);
  const Vector y = randn(50, 1, 48).col(0);
  const auto sol = solve(make_problem(a, y, L1Ball{0.5}));
  CHECK(sol.converged);
  CHECK(sol.feasibility_gap < kFeasibilityTol);
  // <grad f(x*), z - x*> >= 0 at the vertices of the ball
  const Vector g = 2.0 * a.transpose() * (a * sol.x - y);
  for (Index i = 0; i < 10; ++i)
    for (double s : {-0.5, 0.5}) {
      Vector z = Vector::Zero(10);
      z[i] = s;
      CHECK(g.dot(z - sol.x) >= -1e-6 * g.norm());
    }
}

TEST_CASE("solver objective trace is non-increasing") {
  const Matrix a = randn(40, 12, 49);
  const Vector y = randn(40, 1, 50).col(0);
  SolverOptions opts;
  opts.record_trace = true;
  for (const ConstraintSpec& c :
       {ConstraintSpec{L1Ball{1.0}}, ConstraintSpec{Simplex{}},
        ConstraintSpec{NuclearBall{1.0, 4, 3}},
        ConstraintSpec{GroupL1Ball{1.0, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8, 9, 10, 11}}}}}) {
    const auto sol = solve_projected_gradient(a, y, c, opts);
    REQUIRE(!sol.objective_trace.empty());
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
      CHECK(sol.objective_trace[i] <= sol.objective_trace[i - 1] * (1 + 1e-12) + 1e-14);
    CHECK(sol.feasibility_gap < kFeasibilityTol);
  }
}

TEST_CASE("simplex solution matches a fine-grid oracle in 2D") {
  const Matrix a = randn(6, 2, 51);
  const Vector y = randn(6, 1, 52).col(0);
  const auto sol = solve(make_problem(a, y, Simplex{}));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100000; ++i) {
    Vector x(2);
    x << i / 1e5, 1 - i / 1e5;
    best = std::min(best, oracle::naive_objective(a, y, x));
  }
  CHECK(sol.objective <= best + 1e-9);
}

TEST_CASE("svm dual construction") {
  Matrix samples(2, 4);
  samples << 1, 2, -1, -2, 1, 1, -1, -1;
  Vector labels(4);
  labels << 1, 1, -1, -1;
  const auto p = build_svm_dual(samples, labels, 2.0);
  CHECK(p.rows() == 6);
  CHECK(p.cols() == 4);
  CHECK(p.y.isZero());
  CHECK(std::holds_alternative<Simplex>(p.constraint));
  const auto sol = solve(p);
  const Vector w = svm_primal_weights(samples, labels, sol.x);
  for (Index i = 0; i < 4; ++i) CHECK(labels[i] * w.dot(samples.col(i)) > 0.0);
  CHECK_THROWS_AS(build_svm_dual(samples, Vector::Ones(3), 1.0), std::invalid_argument);
}

TEST_CASE("weighted low rank design") {
  const Matrix z = randn(3, 2, 53);
  Vector w(2);
  w << 1.0, 2.0;
  const auto p = build_weighted_lowrank(z, w, 1.0);
  CHECK(p.rows() == 6);
  CHECK(p.a(4, 4) == 2.0);
  CHECK(p.y[4] == doctest::Approx(2.0 * z(1, 1)));
  CHECK(std::get<NuclearBall>(p.constraint).rows == 3);
}

TEST_CASE("solver options json") {
  SolverOptions o;
  o.max_iters = 17;
  o.acceleration = false;
  const auto back = solver_options_from_json(to_json(o));
  CHECK(back.max_iters == 17);
  CHECK_FALSE(back.acceleration);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/sketch.hpp"

#include <nlohmann/json.hpp>

using namespace sketchls;

TEST_CASE("apply matches the dense matrix") {
  CounterRng rng(31);
  Matrix a(37, 4);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  for (auto kind : {SketchKind::Gaussian, SketchKind::Rademacher, SketchKind::RosHadamard}) {
    const auto op = SketchOperator::build({kind, 9, 4}, 37);
    CHECK(op.rows() == 9);
    CHECK(op.cols() == 37);
    CHECK((op.apply(a) - op.dense() * a).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((op.apply(Vector(a.col(0))) - op.dense() * a.col(0)).norm() < 1e-10);
  }
}

TEST_CASE("ros rows come from the Sylvester matrix") {
  const auto op = SketchOperator::build({SketchKind::RosHadamard, 6, 1}, 12);
  CHECK(op.padded_rows() == 16);
  const Matrix h = oracle::sylvester_hadamard(16);
  const Matrix s = op.dense();
  for (Index r = 0; r < 6; ++r)
    for (Index j = 0; j < 12; ++j)
      CHECK(s(r, j) == h(op.picks()[static_cast<std::size_t>(r)], j) * op.signs()[j]);
}

TEST_CASE("dense rows are independent of m") {
  for (auto kind : {SketchKind::Gaussian, SketchKind::Rademacher}) {
    const Matrix a = SketchOperator::build({kind, 5, 9}, 20).dense();
    const Matrix b = SketchOperator::build({kind, 8, 9}, 20).dense();
    CHECK(a == b.topRows(5));
  }
  const Matrix r = SketchOperator::build({SketchKind::Rademacher, 5, 9}, 20).dense();
  CHECK((r.array().abs() == 1.0).all());
}

TEST_CASE("same seed same operator") {
  for (auto kind : {SketchKind::Gaussian, SketchKind::Rademacher, SketchKind::RosHadamard}) {
    CHECK(SketchOperator::build({kind, 4, 77}, 10).dense() ==
          SketchOperator::build({kind, 4, 77}, 10).dense());
    CHECK(SketchOperator::build({kind, 4, 77}, 10).dense() !=
          SketchOperator::build({kind, 4, 78}, 10).dense());
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(SketchOperator::build({SketchKind::Gaussian, 0, 1}, 4), std::invalid_argument);
  CHECK_THROWS_AS(SketchOperator::build({SketchKind::Gaussian, 2, 1}, 0), std::invalid_argument);
  const auto op = SketchOperator::build({SketchKind::RosHadamard, 2, 1}, 4);
  CHECK_THROWS_AS(op.apply(Matrix(Matrix::Ones(5, 1))), std::invalid_argument);
  CHECK_THROWS_AS(sketch_kind_from_string("srht"), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
  const SketchSpec spec{SketchKind::RosHadamard, 12, 99};
  const auto j = to_json(spec);
  CHECK(j["kind"] == "ros");
  const auto back = sketch_spec_from_json(j);
  CHECK(back.kind == spec.kind);
  CHECK(back.m == 12);
  CHECK(back.seed == 99);
  CHECK_THROWS(sketch_spec_from_json(nlohmann::json{{"kind", "ros"}, {"m", 0}}));
}

TEST_CASE("sketch_problem keeps constraint") {
  Matrix a = Matrix::Identity(8, 3);
  const auto p = make_problem(a, Vector::Ones(8), L1Ball{2.0});
  const auto op = SketchOperator::build({SketchKind::Gaussian, 5, 1}, 8);
  const auto sp = sketch_problem(p, op);
  CHECK(sp.rows() == 5);
  CHECK(std::get<L1Ball>(sp.constraint).radius == 2.0);
  CHECK((sp.y - op.dense() * p.y).norm() < 1e-12);
}

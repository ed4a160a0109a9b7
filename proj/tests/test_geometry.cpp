#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sketchls/geometry.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/solve.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

using namespace sketchls;

namespace {
Matrix randn(Index r, Index c, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

// E||g|| for g ~ N(0, I_k), via lgamma.
double chi_mean(double k) {
  return std::sqrt(2.0) * std::exp(std::lgamma((k + 1) / 2) - std::lgamma(k / 2));
}
}  // namespace

TEST_CASE("subspace width tracks the chi mean") {
  const Matrix a = randn(60, 10, 61);
  const auto w = width_subspace_mc(a, 2000, 3);
  CHECK(w.method == WidthMethod::SubspaceMc);
  CHECK(std::abs(w.value - chi_mean(10)) < 4 * w.std_error);
  CHECK(w.value <= std::sqrt(10.0) + 3 * w.std_error);
  CHECK_THROWS_AS(width_subspace_mc(Matrix::Zero(4, 2), 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(width_subspace_mc(a, 0, 1), std::invalid_argument);
}

TEST_CASE("closed form width bounds") {
  Vector w(3);
  w << 1.0, 2.0, 4.0;
  const auto nb = width_bound_nuclear(w, 2, 9, 16);
  CHECK(nb.value == doctest::Approx(2.0 * 4.0 * std::sqrt(2.0) * 7.0));
  const Matrix a = Matrix::Identity(8, 8) * 3.0;
  ReEstimate re;
  re.gamma_minus = 9.0;
  const auto lb = width_bound_l1(a, 2, re);
  CHECK(lb.value == doctest::Approx(6.0 * std::sqrt(2.0 * std::log(8.0))));
  re.gamma_minus = 0.0;
  CHECK_THROWS_AS(width_bound_l1(a, 2, re), std::invalid_argument);
  const auto gb = width_bound_group(a, {{0, 1}, {2, 3}, {4, 5, 6, 7}}, 1, 9.0);
  CHECK(gb.value == doctest::Approx(std::sqrt(3.0 / 9.0 * (std::log(3.0) + 4.0))));
}

TEST_CASE("cone widths on a finite set") {
  std::vector<Vector> dirs;
  for (Index i = 0; i < 5; ++i) dirs.push_back(Vector::Unit(5, i));
  const auto gw = width_cone_mc(dirs, 4000, 1);
  // E max |g_i| over 5 coordinates is about 1.5
  CHECK(gw.value > 1.3);
  CHECK(gw.value < 1.7);
  CHECK(rademacher_width_cone_mc(dirs, 50, 1).value == doctest::Approx(1.0));
  CHECK(sketch_width_cone_mc(dirs, SketchKind::Gaussian, 8, 100, 1).value > 0.0);
  CHECK_THROWS_AS(width_cone_mc({}, 10, 1), std::invalid_argument);
}

TEST_CASE("restricted eigenvalues: heuristic within brute-force envelope") {
  const Matrix a = randn(30, 10, 62);
  ReOptions brute;
  brute.method = ReMethod::BruteForceSupports;
  const auto bf = restricted_eig(a, 1, ReMode::Both, brute);
  CHECK(bf.certified);
  const auto h = restricted_eig(a, 1, ReMode::Both);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(a.transpose() * a).eigenvalues();
  CHECK(h.gamma_minus >= ev[0] - 1e-9);
  CHECK(h.gamma_plus <= ev[9] + 1e-9);
  CHECK(h.gamma_minus <= h.gamma_plus);
  const auto lo = restricted_eig(a, 1, ReMode::Min);
  CHECK(std::isinf(lo.gamma_plus));
  const auto hi = restricted_eig(a, 1, ReMode::Max);
  CHECK(hi.gamma_minus == 0.0);
  CHECK_THROWS_AS(restricted_eig(a, 0, ReMode::Both), std::invalid_argument);
  CHECK_THROWS_AS(restricted_eig(randn(30, 21, 1), 1, ReMode::Both, brute), std::invalid_argument);
}

TEST_CASE("restricted eigenvalues for identity design") {
  const auto re = restricted_eig(Matrix::Identity(6, 6) * 2.0, 2, ReMode::Both);
  CHECK(re.gamma_minus == doctest::Approx(4.0));
  CHECK(re.gamma_plus == doctest::Approx(4.0));
}

TEST_CASE("recommendations") {
  RecommendParams p;
  p.rank = 500;
  auto r = recommend_sketch_size("cor2a", 1.0, 1.5, p);
  CHECK(r.m == 750);
  CHECK(recommend_sketch_size("cor2a", 0.5, 1.5, p).m == 3000);
  p.k = 12;
  p.d = 128;
  CHECK(recommend_sketch_size("cor4a", 1.0, 4.0, p).m ==
        static_cast<Index>(std::ceil(4.0 * 12 * std::log(128.0))));
  p.width = 3.0;
  CHECK(recommend_sketch_size("thm1", 1.0, 2.0, p).m == 18);
  p.colnorm_max_sq = 4.0;
  p.gamma_minus = 1.0;
  auto c3 = recommend_sketch_size("cor3a", 1.0, 1.0, p);
  CHECK(c3.terms.size() == 2);
  CHECK(c3.m == static_cast<Index>(std::ceil(4.0 * 12 * std::log(128.0))));
  CHECK_THROWS_AS(recommend_sketch_size("cor6a", 1.0, 1.0, p), std::invalid_argument);
  CHECK_THROWS_AS(recommend_sketch_size("nope", 1.0, 1.0, p), std::invalid_argument);
  CHECK_THROWS_AS(recommend_sketch_size("cor2a", 0.0, 1.0, p), std::invalid_argument);
  const auto j = to_json(r);
  CHECK(j["m"] == 750);
  const auto pj = recommend_params_from_json(nlohmann::json{{"rank", 10}, {"n", 1024}});
  CHECK(recommend_sketch_size("cor2b", 1.0, 1.0, pj).m ==
        static_cast<Index>(std::ceil(10 * std::pow(std::log(1024.0), 4.0))));
}

TEST_CASE("ros sketch size is the smallest feasible m") {
  const Index m = ros_sketch_size(1.0, 1.0, 2.0, 1.5, 100);
  const double rhs = (4.0 + std::log(100.0)) * 2.25;
  CHECK(m / std::log(static_cast<double>(m)) > rhs);
  CHECK((m - 1) / std::log(static_cast<double>(m - 1)) <= rhs);
}

TEST_CASE("subspace certificate matches direct computation and bounds the ratio") {
  const Matrix a = randn(128, 6, 63);
  const Vector y = randn(128, 1, 64).col(0);
  const auto star = solve_unconstrained(a, y);
  for (auto kind : {SketchKind::Gaussian, SketchKind::Rademacher, SketchKind::RosHadamard}) {
    const auto op = SketchOperator::build({kind, 40, 5}, 128);
    const auto cert = certificate_subspace(a, y, star.x, op);
    // direct route through the dense sketch and a Householder basis
    const Matrix s = op.dense();
    const Matrix u = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(128, 6);
    const Vector res = (a * star.x - y).normalized();
    const Vector sv = Eigen::JacobiSVD<Matrix>(s * u).singularValues();
    CHECK(cert.z1 == doctest::Approx(sv[5] * sv[5] / 40.0).epsilon(1e-9));
    const Matrix mid = s.transpose() * s / 40.0 - Matrix::Identity(128, 128);
    CHECK(cert.z2 == doctest::Approx((u.transpose() * mid * res).norm()).epsilon(1e-9));
    CHECK(cert.exact);
    CHECK(cert.bound >= 1.0);
    const auto hat = solve_unconstrained(s * a, s * y);
    CHECK((a * hat.x - y).squaredNorm() <= cert.bound * star.objective * (1 + 1e-8));
  }
  const auto tiny = SketchOperator::build({SketchKind::Gaussian, 3, 5}, 128);
  const auto c = certificate_subspace(a, y, star.x, tiny);
  CHECK(std::isinf(c.bound));
  CHECK(to_json(c)["bound"].is_null());
}

TEST_CASE("sampled certificate") {
  const Matrix a = randn(64, 8, 65);
  const Vector y = randn(64, 1, 66).col(0);
  const auto p = make_problem(a, y, L1Ball{0.5});
  const auto star = solve(p);
  const auto dirs = tangent_cone_sample(p, star.x, 50, 2);
  const auto op = SketchOperator::build({SketchKind::Gaussian, 32, 1}, 64);
  const auto cert = certificate_sampled(p, star.x, op, dirs);
  CHECK_FALSE(cert.exact);
  CHECK(cert.z1 > 0.0);
  CHECK(cert.bound >= 1.0);
  CHECK_THROWS_AS(certificate_sampled(p, star.x, op, {}), std::invalid_argument);
}

TEST_CASE("mutual information bound") {
  CHECK(mutual_info_per_symbol_bound(10, 20, 1.0) ==
        doctest::Approx(0.25 * std::log(2 * M_PI * M_E)));
  CHECK_THROWS_AS(mutual_info_per_symbol_bound(1, 0, 1), std::invalid_argument);
}

#include "sketchls/sketch.hpp"

#include "sketchls/rng.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <span>
#include <stdexcept>

namespace sketchls {
namespace {

// Stream ids separating the ROS sign and pick draws from dense rows.
constexpr std::uint64_t kSignStream = 0xffffffff00000001ULL;
constexpr std::uint64_t kPickStream = 0xffffffff00000002ULL;

}  // namespace

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::Gaussian: return "gaussian";
    case SketchKind::Rademacher: return "rademacher";
    case SketchKind::RosHadamard: return "ros";
  }
  return "unknown";
}

SketchKind sketch_kind_from_string(const std::string& s) {
  if (s == "gaussian") return SketchKind::Gaussian;
  if (s == "rademacher") return SketchKind::Rademacher;
  if (s == "ros") return SketchKind::RosHadamard;
  throw std::invalid_argument("unknown sketch kind '" + s + "'");
}

nlohmann::json to_json(const SketchSpec& spec) {
  return {{"kind", to_string(spec.kind)}, {"m", spec.m}, {"seed", spec.seed}};
}

SketchSpec sketch_spec_from_json(const nlohmann::json& j) {
  SketchSpec spec;
  spec.kind = sketch_kind_from_string(j.at("kind").get<std::string>());
  spec.m = j.at("m").get<Index>();
  spec.seed = j.value("seed", std::uint64_t{0});
  if (spec.m < 1) throw std::invalid_argument("sketch spec: m must be >= 1");
  return spec;
}

SketchOperator SketchOperator::build(const SketchSpec& spec, Index n) {
  if (spec.m < 1) throw std::invalid_argument("sketch: m must be >= 1");
  if (n < 1) throw std::invalid_argument("sketch: n must be >= 1");
  SketchOperator op;
  op.kind_ = spec.kind;
  op.m_ = spec.m;
  op.n_ = n;
  op.seed_ = spec.seed;
  switch (spec.kind) {
    case SketchKind::Gaussian:
    case SketchKind::Rademacher: {
      op.n_pad_ = n;
      op.payload_.resize(spec.m, n);
      const bool gaussian = spec.kind == SketchKind::Gaussian;
      for (Index i = 0; i < spec.m; ++i) {
        CounterRng rng(spec.seed, static_cast<std::uint64_t>(i));
        for (Index j = 0; j < n; ++j) op.payload_(i, j) = gaussian ? rng.normal() : rng.sign();
      }
      break;
    }
    case SketchKind::RosHadamard: {
      op.n_pad_ = static_cast<Index>(next_pow2(static_cast<std::size_t>(n)));
      CounterRng sign_rng(spec.seed, kSignStream);
      op.signs_.resize(op.n_pad_);
      for (Index j = 0; j < op.n_pad_; ++j) op.signs_[j] = sign_rng.sign();
      CounterRng pick_rng(spec.seed, kPickStream);
      op.picks_.resize(static_cast<std::size_t>(spec.m));
      for (auto& p : op.picks_) p = static_cast<Index>(pick_rng.below(static_cast<std::uint64_t>(op.n_pad_)));
      break;
    }
  }
  return op;
}

Matrix SketchOperator::apply(const Matrix& m) const {
  if (m.rows() != n_)
    throw std::invalid_argument("sketch apply: expected " + std::to_string(n_) + " rows, got " +
                                std::to_string(m.rows()));
  if (kind_ != SketchKind::RosHadamard) return payload_ * m;

  Matrix out(m_, m.cols());
  std::vector<double> buf(static_cast<std::size_t>(n_pad_));
  for (Index c = 0; c < m.cols(); ++c) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (Index i = 0; i < n_; ++i) buf[static_cast<std::size_t>(i)] = signs_[i] * m(i, c);
    fwht_inplace(std::span<double>(buf));
    for (Index r = 0; r < m_; ++r) out(r, c) = buf[static_cast<std::size_t>(picks_[static_cast<std::size_t>(r)])];
  }
  return out;
}

Vector SketchOperator::apply(const Vector& v) const {
  return apply(Matrix(v)).col(0);
}

Matrix SketchOperator::dense() const {
  if (kind_ != SketchKind::RosHadamard) return payload_;
  // Row r: entry j = H~(p_r, j) * nu_j, with H~(a, b) = (-1)^popcount(a & b).
  Matrix s(m_, n_);
  for (Index r = 0; r < m_; ++r) {
    const auto p = static_cast<unsigned long long>(picks_[static_cast<std::size_t>(r)]);
    for (Index j = 0; j < n_; ++j) {
      const int parity = std::popcount(p & static_cast<unsigned long long>(j)) & 1;
      s(r, j) = (parity ? -1.0 : 1.0) * signs_[j];
    }
  }
  return s;
}

Problem sketch_problem(const Problem& p, const SketchOperator& op) {
  if (op.cols() != p.rows())
    throw std::invalid_argument("sketch_problem: operator expects " + std::to_string(op.cols()) +
                                " rows, problem has " + std::to_string(p.rows()));
  return Problem{op.apply(p.a), op.apply(p.y), p.constraint};
}

}  // namespace sketchls

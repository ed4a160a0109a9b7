#pragma once

#include "sketchls/model.hpp"
#include "sketchls/tensor.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sketchls {

enum class SketchKind { Gaussian, Rademacher, RosHadamard };

/// "gaussian", "rademacher" or "ros".
std::string to_string(SketchKind kind);
SketchKind sketch_kind_from_string(const std::string& s);

struct SketchSpec {
  SketchKind kind = SketchKind::Gaussian;
  Index m = 1;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const SketchSpec& spec);
SketchSpec sketch_spec_from_json(const nlohmann::json& j);

/// A realized sketch S (m x n), stored unnormalized: E[S^T S] = m I.
///
/// Gaussian and Rademacher rows are generated from a counter-based stream
/// keyed by (seed, row), so row i is the same regardless of m. The ROS
/// sketch keeps signs nu in {-1,+1}^{n_pad} and m row picks drawn i.i.d.
/// uniformly (with replacement) from {0..n_pad-1}; its i-th row is
/// sqrt(n_pad) D H^T e_{p_i} with H the orthonormal Hadamard matrix, which
/// equals row p_i of the +-1 Hadamard matrix times D restricted to the
/// first n columns.
class SketchOperator {
 public:
  static SketchOperator build(const SketchSpec& spec, Index n);

  SketchKind kind() const { return kind_; }
  Index rows() const { return m_; }
  Index cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  /// Sub-Gaussian parameter recorded for the dense ensembles (always 1).
  double sigma() const { return 1.0; }

  /// Power of two used by the ROS transform (n for dense kinds).
  Index padded_rows() const { return n_pad_; }
  const Vector& signs() const { return signs_; }
  const std::vector<Index>& picks() const { return picks_; }

  /// S * M, M has n rows.
  Matrix apply(const Matrix& m) const;
  Vector apply(const Vector& v) const;

  /// Explicit m x n matrix.
  Matrix dense() const;

 private:
  SketchKind kind_ = SketchKind::Gaussian;
  Index m_ = 0;
  Index n_ = 0;
  Index n_pad_ = 0;
  std::uint64_t seed_ = 0;
  Matrix payload_;  // dense kinds
  Vector signs_;    // ROS
  std::vector<Index> picks_;
};

/// (S A, S y) with the same constraint.
Problem sketch_problem(const Problem& p, const SketchOperator& op);

}  // namespace sketchls

#pragma once

#include "sketchls/model.hpp"

#include <nlohmann/json_fwd.hpp>

namespace sketchls {

struct SolverOptions {
  int max_iters = 5000;
  /// Stop once (f_prev - f) / f_prev stays below this for 3 iterations.
  double rel_obj_tol = 1e-12;
  /// Stop once ||x - x+|| / step falls below this times max(1, ||grad f(0)||).
  double grad_map_tol = 1e-8;
  bool acceleration = true;
  double step_safety = 1.0;
  bool record_trace = false;
};

nlohmann::json to_json(const SolverOptions& opts);
SolverOptions solver_options_from_json(const nlohmann::json& j);

/// Minimum-norm least-squares solution via complete orthogonal decomposition.
Solution solve_unconstrained(const Matrix& a, const Vector& y);

/// Projected gradient on f(x) = ||Ax - y||^2 with gradient 2A^T(Ax - y) and
/// step = step_safety / (2 L), L an estimate of sigma_max(A)^2. With
/// acceleration, a Nesterov step whose objective exceeds the current one is
/// discarded and replaced by a plain projected-gradient step from the
/// current point (momentum reset), so accepted objectives never increase.
Solution solve_projected_gradient(const Matrix& a, const Vector& y, const ConstraintSpec& c,
                                  const SolverOptions& opts = {});

/// QR path for unconstrained problems, projected gradient otherwise.
Solution solve(const Problem& p, const SolverOptions& opts = {});

/// SVM dual: samples holds a_i as columns (features x count), labels z_i in
/// {-1, +1}. Returns min ||B x||^2 over the simplex with B = [A D; I / C].
Problem build_svm_dual(const Matrix& samples, const Vector& labels, double c);

/// w = sum_i x_i z_i a_i.
Vector svm_primal_weights(const Matrix& samples, const Vector& labels, const Vector& dual);

/// Weighted low-rank approximation of Z (d1 x d2) with column weights omega:
/// design blkdiag(omega_j I_{d1}), observations omega_j z_j per block,
/// NuclearBall(radius, d1, d2).
Problem build_weighted_lowrank(const Matrix& z, const Vector& weights, double radius);

}  // namespace sketchls

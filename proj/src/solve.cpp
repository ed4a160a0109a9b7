#include "sketchls/solve.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sketchls {
namespace {

// f(x) = ||Ax - y||^2 evaluated either directly (n < d) or through the Gram
// matrix as f_ls + (x - x_ls)^T G (x - x_ls), which stays accurate when f is
// small relative to ||y||^2.
class LeastSquaresModel {
 public:
  LeastSquaresModel(const Matrix& a, const Vector& y) : a_(a), y_(y) {
    gram_mode_ = a.rows() >= a.cols();
    if (gram_mode_) {
      gram_.noalias() = a.transpose() * a;
      x_ls_ = Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(y);
      f_ls_ = (a * x_ls_ - y).squaredNorm();
    }
  }

  // Returns f(x) and writes the gradient 2 A^T (Ax - y).
  double evaluate(const Vector& x, Vector& grad) const {
    if (gram_mode_) {
      const Vector e = x - x_ls_;
      const Vector ge = gram_ * e;
      grad = 2.0 * ge;
      return f_ls_ + std::max(0.0, e.dot(ge));
    }
    const Vector r = a_ * x - y_;
    grad.noalias() = 2.0 * (a_.transpose() * r);
    return r.squaredNorm();
  }

  double value(const Vector& x) const {
    if (gram_mode_) {
      const Vector e = x - x_ls_;
      return f_ls_ + std::max(0.0, e.dot(gram_ * e));
    }
    return (a_ * x - y_).squaredNorm();
  }

 private:
  const Matrix& a_;
  const Vector& y_;
  bool gram_mode_ = false;
  Matrix gram_;
  Vector x_ls_;
  double f_ls_ = 0.0;
};

void check_dims(const Matrix& a, const Vector& y) {
  if (a.rows() < 1 || a.cols() < 1) throw std::invalid_argument("solve: empty design");
  if (a.rows() != y.size()) throw std::invalid_argument("solve: A rows != len(y)");
}

}  // namespace

nlohmann::json to_json(const SolverOptions& o) {
  return {{"max_iters", o.max_iters},       {"rel_obj_tol", o.rel_obj_tol},
          {"grad_map_tol", o.grad_map_tol}, {"acceleration", o.acceleration},
          {"step_safety", o.step_safety}};
}

SolverOptions solver_options_from_json(const nlohmann::json& j) {
  SolverOptions o;
  o.max_iters = j.value("max_iters", o.max_iters);
  o.rel_obj_tol = j.value("rel_obj_tol", o.rel_obj_tol);
  o.grad_map_tol = j.value("grad_map_tol", o.grad_map_tol);
  o.acceleration = j.value("acceleration", o.acceleration);
  o.step_safety = j.value("step_safety", o.step_safety);
  if (o.max_iters < 1 || !(o.rel_obj_tol > 0) || !(o.grad_map_tol > 0) ||
      !(o.step_safety > 0 && o.step_safety <= 1))
    throw std::invalid_argument("solver options out of range");
  return o;
}

Solution solve_unconstrained(const Matrix& a, const Vector& y) {
  check_dims(a, y);
  Solution s;
  s.x = Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(y);
  s.objective = (a * s.x - y).squaredNorm();
  s.iterations = 1;
  s.feasibility_gap = 0.0;
  s.converged = true;
  return s;
}

Solution solve_projected_gradient(const Matrix& a, const Vector& y, const ConstraintSpec& c,
                                  const SolverOptions& opts) {
  check_dims(a, y);
  validate(c, a.cols());
  const Index d = a.cols();

  Solution sol;
  Vector x = project(c, Vector::Zero(d));
  if (a.isZero(0.0)) {
    sol.x = x;
    sol.objective = y.squaredNorm();
    sol.converged = true;
    sol.feasibility_gap = feasibility_gap(c, x);
    return sol;
  }

  const LeastSquaresModel model(a, y);
  const double lipschitz = 2.0 * spectral_norm_sq(a).value;
  const double step = opts.step_safety / lipschitz;
  const double gm_scale = std::max(1.0, 2.0 * (a.transpose() * y).norm());

  Vector grad(d);
  double fx = model.value(x);
  if (opts.record_trace) sol.objective_trace.push_back(fx);

  Vector z = x;  // extrapolated point
  Vector x_prev = x;
  double t = 1.0;
  bool converged = false;
  int small_steps = 0;  // consecutive iterations below rel_obj_tol
  int it = 0;
  while (it < opts.max_iters) {
    ++it;
    model.evaluate(z, grad);
    Vector x_next = project(c, z - step * grad);
    double f_next = model.value(x_next);
    if (opts.acceleration && f_next > fx) {
      t = 1.0;
      z = x;
      model.evaluate(z, grad);
      x_next = project(c, z - step * grad);
      f_next = model.value(x_next);
    }
    const double grad_map = (z - x_next).norm() / step;
    const double rel_change = fx > 0.0 ? (fx - f_next) / fx : 0.0;

    x_prev = x;
    x = std::move(x_next);
    fx = f_next;
    if (opts.record_trace) sol.objective_trace.push_back(fx);

    small_steps = rel_change >= 0.0 && rel_change < opts.rel_obj_tol ? small_steps + 1 : 0;
    if (grad_map <= opts.grad_map_tol * gm_scale || fx == 0.0 || small_steps >= 3) {
      converged = true;
      break;
    }
    if (opts.acceleration) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      z = x + ((t - 1.0) / t_next) * (x - x_prev);
      t = t_next;
    } else {
      z = x;
    }
  }

  sol.x = std::move(x);
  sol.objective = (a * sol.x - y).squaredNorm();
  sol.iterations = it;
  sol.feasibility_gap = feasibility_gap(c, sol.x);
  sol.converged = converged;
  return sol;
}

Solution solve(const Problem& p, const SolverOptions& opts) {
  if (std::holds_alternative<Unconstrained>(p.constraint)) return solve_unconstrained(p.a, p.y);
  return solve_projected_gradient(p.a, p.y, p.constraint, opts);
}

Problem build_svm_dual(const Matrix& samples, const Vector& labels, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("svm: C must be positive");
  if (samples.cols() != labels.size())
    throw std::invalid_argument("svm: one label per sample column required");
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0)
      throw std::invalid_argument("svm: labels must be -1 or +1");
  }
  const Index features = samples.rows();
  const Index count = samples.cols();
  Matrix b = Matrix::Zero(features + count, count);
  b.topRows(features) = samples * labels.asDiagonal();
  b.bottomRows(count).diagonal().setConstant(1.0 / c);
  return make_problem(std::move(b), Vector::Zero(features + count), Simplex{});
}

Vector svm_primal_weights(const Matrix& samples, const Vector& labels, const Vector& dual) {
  return samples * labels.cwiseProduct(dual);
}

Problem build_weighted_lowrank(const Matrix& z, const Vector& weights, double radius) {
  const Index d1 = z.rows();
  const Index d2 = z.cols();
  if (weights.size() != d2) throw std::invalid_argument("weighted lowrank: one weight per column");
  if ((weights.array() <= 0.0).any()) throw std::invalid_argument("weighted lowrank: weights must be positive");
  const Index dim = d1 * d2;
  Matrix a = Matrix::Zero(dim, dim);
  Vector y(dim);
  for (Index j = 0; j < d2; ++j) {
    a.block(j * d1, j * d1, d1, d1).diagonal().setConstant(weights[j]);
    y.segment(j * d1, d1) = weights[j] * z.col(j);
  }
  return make_problem(std::move(a), std::move(y), NuclearBall{radius, d1, d2});
}

}  // namespace sketchls

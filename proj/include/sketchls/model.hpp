#pragma once

#include "sketchls/tensor.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace sketchls {

/// Feasibility tolerance shared by projections, solvers and validators.
inline constexpr double kFeasibilityTol = 1e-9;
/// Entries of a numerical solution below this magnitude count as zeros.
inline constexpr double kSupportThreshold = 1e-6;

struct Unconstrained {};

struct L1Ball {
  double radius = 1.0;
};

/// Probability simplex {x >= 0, sum x = 1}.
struct Simplex {};

/// {x : ||mat(x)||_* <= radius}, where mat() reshapes column-major into
/// rows x cols (column j is the j-th block of rows entries).
struct NuclearBall {
  double radius = 1.0;
  Index rows = 0;
  Index cols = 0;
};

using Groups = std::vector<std::vector<Index>>;

/// {x : sum_g ||x_g||_2 <= radius} for a partition of the coordinates.
struct GroupL1Ball {
  double radius = 1.0;
  Groups groups;
};

using ConstraintSpec = std::variant<Unconstrained, L1Ball, Simplex, NuclearBall, GroupL1Ball>;

/// JSON tag: "unconstrained", "l1", "simplex", "nuclear" or "group_l1".
std::string kind_name(const ConstraintSpec& c);

/// Throws std::invalid_argument if the constraint is malformed for ambient
/// dimension `dim` (bad radius, groups not a partition, rows*cols != dim).
void validate(const ConstraintSpec& c, Index dim);

nlohmann::json to_json(const ConstraintSpec& c);
ConstraintSpec constraint_from_json(const nlohmann::json& j);

/// min_{x in C} ||A x - y||^2.
struct Problem {
  Matrix a;
  Vector y;
  ConstraintSpec constraint;

  Index rows() const { return a.rows(); }
  Index cols() const { return a.cols(); }
};

/// Validates dimensions, finiteness and the constraint.
Problem make_problem(Matrix a, Vector y, ConstraintSpec constraint);

struct Solution {
  Vector x;
  double objective = 0.0;
  int iterations = 0;
  double feasibility_gap = 0.0;
  bool converged = false;
  /// Objective after each accepted iterate; filled only on request.
  std::vector<double> objective_trace;
};

/// ||A x - y||_2^2.
double objective(const Problem& p, const Vector& x);

Vector project(const ConstraintSpec& c, const Vector& v);
Vector project_l1_ball(const Vector& v, double radius);
Vector project_simplex(const Vector& v);
Vector project_group_l1_ball(const Vector& v, const Groups& groups, double radius);
Matrix project_nuclear_ball(const Matrix& m, double radius);

double l1_norm(const Vector& v);
double group_norm(const Vector& v, const Groups& groups);
double nuclear_norm(const Matrix& m);

/// How far `x` is outside the set (0 when feasible). For the simplex this is
/// max(|sum - 1|, max_i(-x_i)).
double feasibility_gap(const ConstraintSpec& c, const Vector& x);

/// Number of entries with magnitude >= threshold.
Index support_size(const Vector& x, double threshold = kSupportThreshold);

/// Draws feasible points x from a per-constraint sampler and returns the
/// normalized images A(x - xstar)/||A(x - xstar)||. Directions with norm
/// below 1e-10 are discarded; throws std::runtime_error if fewer than
/// `count` survive after 100*count draws.
///
/// Samplers: unconstrained - xstar + standard Gaussian; l1 - random radius
/// times a Dirichlet(1) mix of signed vertices; simplex - Dirichlet(1);
/// group - random radius times Dirichlet(1) group weights on random unit
/// blocks; nuclear - Gaussian matrix rescaled to nuclear norm U(0,1)*R.
std::vector<Vector> tangent_cone_sample(const Problem& p, const Vector& xstar, int count,
                                        std::uint64_t seed);

}  // namespace sketchls

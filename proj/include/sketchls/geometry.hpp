#pragma once

#include "sketchls/model.hpp"
#include "sketchls/sketch.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sketchls {

enum class WidthMethod { SubspaceMc, L1Bound, NuclearBound, GroupBound, ConeMcLower };
std::string to_string(WidthMethod m);

struct WidthEstimate {
  double value = 0.0;
  WidthMethod method = WidthMethod::SubspaceMc;
  int samples = 0;
  double std_error = 0.0;
};

nlohmann::json to_json(const WidthEstimate& w);

enum class ReMethod { HeuristicMultistart, BruteForceSupports };
enum class ReMode { Min, Max, Both };

/// Restricted eigenvalues over {||z||_2 = 1, ||z||_1 <= 2 sqrt(k)}.
struct ReEstimate {
  double gamma_minus = 0.0;
  double gamma_plus = 0.0;
  Index k = 0;
  ReMethod method = ReMethod::HeuristicMultistart;
  bool certified = false;
};

struct ReOptions {
  ReMethod method = ReMethod::HeuristicMultistart;
  int restarts = 20;
  int iterations = 300;
  std::uint64_t seed = 7;
};

/// Exact, once the residual direction is fixed: z1 and z2 are the infimum and
/// supremum over the whole cone. Sampled certificates bound them from the
/// optimistic side and are labelled exact = false.
struct Certificate {
  double z1 = 0.0;
  double z2 = 0.0;
  double bound = 1.0;  // (1 + 2 z2 / z1)^2, +inf when z1 = 0
  bool exact = false;
};

nlohmann::json to_json(const Certificate& c);

/// Monte-Carlo mean of ||P_col(A) g||_2 over Gaussian g in R^n.
WidthEstimate width_subspace_mc(const Matrix& a, int samples, std::uint64_t seed);

/// 6 sqrt(k log d) max_j ||a_j||_2 / sqrt(gamma_minus).
WidthEstimate width_bound_l1(const Matrix& a, Index k, const ReEstimate& re);

/// 2 (omega_max / omega_min) sqrt(r) (sqrt(d1) + sqrt(d2)).
WidthEstimate width_bound_nuclear(const Vector& weights, Index rank, Index d1, Index d2);

/// sqrt(max_g ||A_g||_op / gamma_minus * (k log|G| + k M)), M the largest
/// group size; the group analogue of the l1 bound without the constant.
WidthEstimate width_bound_group(const Matrix& a, const Groups& groups, Index k,
                                double gamma_minus);

/// Lower estimate of E sup |<g, z>| over a finite set of unit directions.
WidthEstimate width_cone_mc(const std::vector<Vector>& directions, int samples,
                            std::uint64_t seed);
/// Same with Rademacher signs in place of g.
WidthEstimate rademacher_width_cone_mc(const std::vector<Vector>& directions, int samples,
                                       std::uint64_t seed);
/// Same with g paired against S z / sqrt(m), averaging over fresh sketches.
WidthEstimate sketch_width_cone_mc(const std::vector<Vector>& directions, SketchKind kind,
                                   Index m, int samples, std::uint64_t seed);

/// Smallest m with m / log m > c0 / delta^2 (R^2 + log n) W_S^2.
Index ros_sketch_size(double c0, double delta, double rademacher_width, double sketch_width,
                      Index n);

ReEstimate restricted_eig(const Matrix& a, Index k, ReMode mode, const ReOptions& opts = {});

struct RecommendParams {
  std::optional<double> width;           // Gaussian width of the transformed cone
  std::optional<double> rank;            // rank(A)
  std::optional<double> n;               // ambient rows (ROS log factors)
  std::optional<double> k;               // sparsity / support size / active groups
  std::optional<double> d;               // ambient dimension
  std::optional<double> colnorm_max_sq;  // max_j ||a_j||^2
  std::optional<double> gamma_minus;
  std::optional<double> gamma_plus;
  std::optional<double> kappa_sq;        // max w^2 / min w^2
  std::optional<double> r;               // rank of X*
  std::optional<double> d1;
  std::optional<double> d2;
  std::optional<double> groups;          // |G|
  std::optional<double> max_group_size;  // M
  std::optional<double> group_opnorm_max;
};

RecommendParams recommend_params_from_json(const nlohmann::json& j);

struct Recommendation {
  std::string formula;
  Index m = 0;
  std::map<std::string, double> terms;  // c0/delta^2 times each branch
  double delta = 1.0;
  double c0 = 1.0;
};

nlohmann::json to_json(const Recommendation& r);

/// Formula ids: thm1, cor2a, cor2b, cor3a, cor3b, cor4a, cor4b, cor5, cor6a,
/// cor6b, cor7. Evaluates each branch, returns ceil(min over branches).
/// Logs are natural.
Recommendation recommend_sketch_size(const std::string& formula, double delta, double c0,
                                     const RecommendParams& params);

/// Exact z1, z2 for an unconstrained problem: with U a basis of col(A) and
/// u the unit residual, z1 = sigma_min(S U)^2 / m and
/// z2 = ||U^T (S^T S / m - I) u||_2.
Certificate certificate_subspace(const Matrix& a, const Vector& y, const Vector& xstar,
                                 const SketchOperator& op);

/// z1 = min ||S v||^2 / m and z2 = max |<u, (S^T S/m - I) v>| over the given
/// unit directions v (from tangent_cone_sample).
Certificate certificate_sampled(const Problem& p, const Vector& xstar, const SketchOperator& op,
                                const std::vector<Vector>& directions);

/// (m / (2n)) log(2 pi e gamma^2).
double mutual_info_per_symbol_bound(double m, double n, double gamma_sq);

}  // namespace sketchls

#pragma once

#include "sketchls/model.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/solve.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sketchls {

enum class ExperimentKind { UncLs, Lasso, Svm, Cs, Nuclear };

/// "unc_ls", "lasso", "svm", "cs", "nuclear".
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::UncLs;
  /// Rows of the design. Ignored by svm (rows = features + samples), cs
  /// (n = d) and nuclear (n = d1 * d2).
  Index n = 1024;
  /// Columns of the design; for svm the number of samples.
  Index d = 100;
  Index d1 = 16;
  Index d2 = 16;
  std::vector<SketchKind> kinds{SketchKind::Gaussian, SketchKind::Rademacher,
                                SketchKind::RosHadamard};
  std::vector<double> alphas{0.2, 0.4, 0.6, 0.8, 1.0};
  int trials = 30;
  std::uint64_t seed = 0;
  double noise_nu = 0.4472135954999579;  // sqrt(0.2)
  /// Constraint radius for lasso and nuclear; cs uses ||x_bar||_1 when unset.
  std::optional<double> radius;
  /// Multiplier in the sketch-size formula; per-experiment default when unset
  /// (unc_ls 1.5, lasso 4, svm 5, cs 4, nuclear 1).
  std::optional<double> c0;
  /// k' for lasso (default d/10), k for cs (default 5).
  std::optional<Index> sparsity;
  /// Rank of the planted low-rank matrix (nuclear).
  Index rank = 2;
  /// Largest/smallest column weight ratio (nuclear).
  double weight_ratio = 2.0;
  /// SVM regularization and feature dimension.
  double svm_c = 1.0;
  Index features = 50;
  /// Compute deterministic ratio certificates per trial (exact for unc_ls, sampled
  /// with this many directions otherwise; 0 disables sampled ones).
  bool certify = false;
  int certify_directions = 0;
  SolverOptions solver;
  /// 0 = hardware concurrency. Output never depends on this.
  int workers = 0;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct TrialRecord {
  std::string experiment;
  std::string kind;
  Index n = 0;
  Index d = 0;
  Index m = 0;
  double alpha = 0.0;
  int trial = 0;
  double f_star = 0.0;
  double f_hat = 0.0;
  double ratio = 0.0;               // NaN when f_star = 0
  double recovery_error_inf = 0.0;  // NaN outside cs
  double cert_bound = 0.0;          // NaN when not computed
  bool converged = true;            // both solves converged
  double sketch_ms = 0.0;
  double solve_ms = 0.0;
};

struct GeneratedInstance {
  Problem problem;
  Vector x0;
};

/// A ~ N(0,1)^{n x d}, x0 a Gaussian direction of unit norm, y = A x0 + w.
GeneratedInstance gen_gaussian_regression(Index n, Index d, double nu, std::uint64_t seed);

/// x0 with k' entries in {-1,+1} on a uniform support, y = A x0 + w,
/// constraint L1Ball(radius).
GeneratedInstance gen_sparse_regression(Index n, Index d, Index k_prime, double nu, double radius,
                                        std::uint64_t seed);

/// Denoising instance: A = I_d, y = x_bar + w, x_bar k-sparse with +-1
/// entries, constraint L1Ball(radius or ||x_bar||_1).
GeneratedInstance gen_sparse_denoising(Index d, Index k, double nu, std::optional<double> radius,
                                       std::uint64_t seed);

struct ClassificationData {
  Matrix samples;  // features x count, one sample per column
  Vector labels;   // +-1
  Matrix means;    // features x 2, columns mu_0 (label -1) and mu_1 (label +1)
};

/// Equal-weight mixture of N(mu_0, I) and N(mu_1, I), means uniform in
/// [-3, 3]^features.
ClassificationData gen_gmm_classification(Index count, Index features, std::uint64_t seed);

/// Weighted low-rank instance: planted rank-r matrix plus noise nu, weights
/// uniform in [1, weight_ratio]. Radius defaults to 0.8 times the planted
/// nuclear norm. x0 is the planted matrix, vectorized.
GeneratedInstance gen_weighted_lowrank(Index d1, Index d2, Index rank, double weight_ratio,
                                       double nu, std::optional<double> radius,
                                       std::uint64_t seed);

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

/// Column order: experiment,kind,n,d,m,alpha,trial,f_star,f_hat,ratio,
/// recovery_error_inf,cert_bound,converged[,sketch_ms,solve_ms].
void export_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path,
                bool include_timings = true);
std::string format_csv(const std::vector<TrialRecord>& records, bool include_timings = true);
std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::string kind;
  double alpha = 0.0;
  int count = 0;  // records with a finite ratio
  double mean_ratio = 0.0;
  double stderr_ratio = 0.0;
  double mean_recovery_error = 0.0;  // NaN outside cs
};

/// Aggregates per (kind, alpha) in order of first appearance.
std::vector<SummaryRow> export_summary(const std::vector<TrialRecord>& records);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

/// Line chart of mean ratio against alpha, one polyline per kind.
void write_svg(const std::vector<SummaryRow>& rows, const std::filesystem::path& path,
               const std::string& title);

/// True when, for the given kind, each adjacent pair of alpha points has
/// mean[i+1] <= mean[i] + sqrt(se[i]^2 + se[i+1]^2).
bool ratio_trend_non_increasing(const std::vector<SummaryRow>& rows, const std::string& kind);

}  // namespace sketchls

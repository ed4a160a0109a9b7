#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sketchls {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& m, std::string_view what);

/// ceil(x) that ignores relative rounding noise (1e-12) just above an integer.
Index ceil_count(double x);

bool is_pow2(std::size_t n);
/// Smallest power of two >= n (n = 0 maps to 1).
std::size_t next_pow2(std::size_t n);

/// Unnormalized Walsh-Hadamard transform (the +-1 matrix, Sylvester order).
/// Applying it twice multiplies by the length.
void fwht_inplace(std::span<double> v);
Vector fwht(Vector v);

/// Appends zero rows until the row count is a power of two.
Matrix pad_pow2(const Matrix& m);

struct QrResult {
  Matrix q;  // rows x cols, orthonormal columns
  Matrix r;  // cols x cols, upper triangular
  /// Columns with |R_ii| < 1e-10 * max_j |R_jj|.
  std::vector<Index> deficient_columns;
};

/// Householder thin QR; requires rows >= cols.
QrResult thin_qr(const Matrix& m);

struct SvdResult {
  Matrix u;
  Vector s;  // non-negative, non-increasing
  Matrix v;
};

SvdResult thin_svd(const Matrix& m);

/// Orthonormal basis of col(m), numerical rank decided by column-pivoted QR.
Matrix column_basis(const Matrix& m, double rel_tol = 1e-10);

inline constexpr std::uint64_t kPowerIterationSeed = 0x5eed5eedULL;

struct SpectralEstimate {
  double value = 0.0;  // estimate of sigma_max(M)^2, never above the truth
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on M^T M from a fixed pseudo-random start vector.
SpectralEstimate spectral_norm_sq(const Matrix& m, double tol = 1e-8,
                                  int max_iters = 2000,
                                  std::uint64_t seed = kPowerIterationSeed);

}  // namespace sketchls

#include "sketchls/tensor.hpp"

#include "sketchls/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sketchls {

void require_finite(const Eigen::Ref<const Matrix>& m, std::string_view what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

Index ceil_count(double x) {
  return static_cast<Index>(std::ceil(x - 1e-12 * std::max(1.0, std::abs(x))));
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_pow2(n))
    throw std::invalid_argument("fwht: length " + std::to_string(n) +
                                " is not a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double s = v[j];
        const double t = v[j + h];
        v[j] = s + t;
        v[j + h] = s - t;
      }
    }
  }
}

Vector fwht(Vector v) {
  fwht_inplace(std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

Matrix pad_pow2(const Matrix& m) {
  const auto rows = static_cast<Index>(next_pow2(static_cast<std::size_t>(m.rows())));
  if (rows == m.rows()) return m;
  Matrix out = Matrix::Zero(rows, m.cols());
  out.topRows(m.rows()) = m;
  return out;
}

QrResult thin_qr(const Matrix& m) {
  if (m.rows() < m.cols())
    throw std::invalid_argument("thin_qr: requires rows >= cols");
  require_finite(m, "thin_qr");
  Eigen::HouseholderQR<Matrix> qr(m);
  QrResult out;
  out.q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  out.r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  const double rmax = out.r.diagonal().cwiseAbs().maxCoeff();
  for (Index j = 0; j < out.r.cols(); ++j) {
    if (std::abs(out.r(j, j)) < 1e-10 * rmax || rmax == 0.0)
      out.deficient_columns.push_back(j);
  }
  return out;
}

SvdResult thin_svd(const Matrix& m) {
  require_finite(m, "thin_svd");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Matrix column_basis(const Matrix& m, double rel_tol) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(rel_tol);
  const Index rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), rank);
  return q;
}

SpectralEstimate spectral_norm_sq(const Matrix& m, double tol, int max_iters,
                                  std::uint64_t seed) {
  if (m.size() == 0 || m.isZero(0.0))
    throw std::invalid_argument("spectral_norm_sq: matrix is zero");
  CounterRng rng(seed);
  Vector v(m.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();

  SpectralEstimate est;
  Vector mv(m.rows());
  double prev = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    mv.noalias() = m * v;
    const double rayleigh = mv.squaredNorm();
    est.value = std::max(est.value, rayleigh);
    est.iterations = it;
    Vector w = m.transpose() * mv;
    const double wn = w.norm();
    if (wn == 0.0) {
      est.converged = true;
      break;
    }
    v = w / wn;
    if (it > 1 && std::abs(rayleigh - prev) <= tol * rayleigh) {
      est.converged = true;
      break;
    }
    prev = rayleigh;
  }
  return est;
}

}  // namespace sketchls

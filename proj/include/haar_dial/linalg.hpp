#pragma once

// Dense complex matrices: just enough arithmetic for mesh synthesis, the
// Ginibre-QR reference sampler and equivalence checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "haar_dial/errors.hpp"

namespace haar_dial {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Row-major dense m x n complex matrix with value semantics.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("ComplexMatrix: " + std::to_string(data_.size()) +
                       " entries for a " + std::to_string(rows_) + "x" +
                       std::to_string(cols_) + " matrix");
    }
  }
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw ShapeError("ComplexMatrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
  }

  static ComplexMatrix diagonal(std::span<const Complex> diag) {
    ComplexMatrix out(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) out(i, i) = diag[i];
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> entries() const { return data_; }
  std::span<Complex> entries() { return data_; }

  std::vector<Complex> column(std::size_t j) const {
    std::vector<Complex> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

/// Largest entry magnitude of a - b.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
  return worst;
}

/// max_ij |(a a^dagger - I)_ij|
inline double unitarity_defect(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("unitarity_defect: matrix is not square");
  return max_abs_diff(matmul(a, adjoint(a)), ComplexMatrix::identity(a.rows()));
}

struct QrResult {
  ComplexMatrix q;
  ComplexMatrix r;
};

/// Householder QR of a square matrix. The diagonal of r carries whatever
/// phases the reflections produce; callers that need a canonical form fix
/// them up themselves.
inline QrResult householder_qr(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("householder_qr: matrix is not square");
  const std::size_t n = a.rows();
  ComplexMatrix r = a;
  ComplexMatrix q = ComplexMatrix::identity(n);
  std::vector<Complex> v(n);

  for (std::size_t k = 0; k < n; ++k) {
    double norm_sq = 0.0;
    for (std::size_t i = k; i < n; ++i) norm_sq += std::norm(r(i, k));
    const double norm_x = std::sqrt(norm_sq);
    if (norm_x < 1e-300) throw DegenerateError("householder_qr: rank-deficient input");

    const Complex x0 = r(k, k);
    const Complex unit = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex{1.0, 0.0};
    const Complex alpha = -unit * norm_x;

    // v = x - alpha e_k; |x0 - alpha| = |x0| + |x| so no cancellation.
    double v_norm_sq = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      v[i] = r(i, k) - (i == k ? alpha : Complex{});
      v_norm_sq += std::norm(v[i]);
    }
    const double v_norm = std::sqrt(v_norm_sq);
    for (std::size_t i = k; i < n; ++i) v[i] /= v_norm;

    // r <- (I - 2 v v^dagger) r on rows k..n-1
    for (std::size_t j = k; j < n; ++j) {
      Complex dot{};
      for (std::size_t i = k; i < n; ++i) dot += std::conj(v[i]) * r(i, j);
      for (std::size_t i = k; i < n; ++i) r(i, j) -= 2.0 * v[i] * dot;
    }
    for (std::size_t i = k + 1; i < n; ++i) r(i, k) = Complex{};
    r(k, k) = alpha;

    // q <- q (I - 2 v v^dagger)
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot{};
      for (std::size_t l = k; l < n; ++l) dot += q(i, l) * v[l];
      for (std::size_t l = k; l < n; ++l) q(i, l) -= 2.0 * dot * std::conj(v[l]);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(r(k, k)) < 1e-300) throw DegenerateError("householder_qr: rank-deficient input");
  }
  return {std::move(q), std::move(r)};
}

}  // namespace haar_dial

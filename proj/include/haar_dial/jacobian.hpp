#pragma once

// The change of variables from circuit parameters r = (r_0, r_1..r_{n-1})
// to squared Gaussian amplitudes x = (x_0..x_{n-1}):
//     x_0 = r_0 r_1,   x_i = r_0 r_{i+1} prod_{k=1..i} (1 - r_k),   r_n = 1.
// Its Jacobian is lower Hessenberg with
//     |det J| = r_0^(n-1) prod_{k=1..n-1} (1 - r_k)^(n-1-k).
// The determinant is checked against central differences; the column
// elimination that turns J into a triangular matrix is replayed on an exact
// (dual-number) Jacobian so that its 1e-10 checks are not swamped by
// finite-difference roundoff.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "haar_dial/errors.hpp"
#include "haar_dial/parallel.hpp"
#include "haar_dial/rng.hpp"

namespace haar_dial {

/// Forward-mode dual number a + b eps, eps^2 = 0.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
inline Dual operator-(double a, Dual b) { return {a - b.v, -b.d}; }

using Matrix = std::vector<std::vector<double>>;

template <class T>
std::vector<T> x_from_r(std::span<const T> r) {
  const std::size_t n = r.size();
  if (n < 2) throw DomainError("x_from_r: need n >= 2");
  std::vector<T> x(n);
  T running = r[0];  // r_0 prod_{k<=i} (1 - r_k)
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) running = running * (1.0 - r[i]);
    x[i] = (i + 1 < n) ? running * r[i + 1] : running;
  }
  return x;
}

inline std::vector<double> x_from_r(std::span<const double> r) { return x_from_r<double>(r); }

/// J_ij = dx_i / dr_j by dual numbers (exact up to rounding).
inline Matrix jacobian_exact(std::span<const double> r) {
  const std::size_t n = r.size();
  Matrix j(n, std::vector<double>(n));
  std::vector<Dual> rd(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t k = 0; k < n; ++k) rd[k] = {r[k], k == col ? 1.0 : 0.0};
    const auto x = x_from_r<Dual>(rd);
    for (std::size_t i = 0; i < n; ++i) j[i][col] = x[i].d;
  }
  return j;
}

inline constexpr double kFiniteDifferenceStep = 1e-6;

/// Central-difference Jacobian with step h.
inline Matrix jacobian_finite_difference(std::span<const double> r, double h = kFiniteDifferenceStep) {
  const std::size_t n = r.size();
  Matrix j(n, std::vector<double>(n));
  std::vector<double> plus(r.begin(), r.end()), minus(r.begin(), r.end());
  for (std::size_t col = 0; col < n; ++col) {
    plus[col] = r[col] + h;
    minus[col] = r[col] - h;
    const auto xp = x_from_r(plus);
    const auto xm = x_from_r(minus);
    for (std::size_t i = 0; i < n; ++i) j[i][col] = (xp[i] - xm[i]) / (2.0 * h);
    plus[col] = minus[col] = r[col];
  }
  return j;
}

/// |det a| by Gaussian elimination with partial pivoting.
inline double abs_determinant(Matrix a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[pivot][k])) pivot = i;
    if (a[pivot][k] == 0.0) return 0.0;
    std::swap(a[k], a[pivot]);
    det *= a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t c = k; c < n; ++c) a[i][c] -= f * a[k][c];
    }
  }
  return std::abs(det);
}

inline double jacobian_closed_form(std::span<const double> r) {
  const std::size_t n = r.size();
  if (n < 2) throw DomainError("jacobian_closed_form: need n >= 2");
  double det = std::pow(r[0], static_cast<double>(n - 1));
  for (std::size_t k = 1; k < n; ++k) det *= std::pow(1.0 - r[k], static_cast<double>(n - 1 - k));
  return det;
}

struct HessenbergCheck {
  bool pass = false;
  double max_cleared_entry = 0.0;        // column-0 entries that should be zero
  double final_element_error = 0.0;      // |J_{n-1,0} - 1| after all steps
  double max_closed_form_error = 0.0;    // vs r_{i+1} prod_{l=k+1..i} (1 - r_l)
  double max_above_diagonal = 0.0;       // after moving column 0 to the end
};

inline constexpr double kHessenbergTolerance = 1e-10;

/// Replays c0 <- c0 - c_k J_{k-1,0} / J_{k-1,k} for k = 1..n-1, checking the
/// intermediate column against its closed form after every step.
inline HessenbergCheck hessenberg_reduction_check(std::span<const double> r) {
  const std::size_t n = r.size();
  if (n < 2) throw DomainError("hessenberg_reduction_check: need n >= 2");
  Matrix j = jacobian_exact(r);
  auto r_at = [&](std::size_t k) { return k < n ? r[k] : 1.0; };
  HessenbergCheck out;
  for (std::size_t k = 1; k < n; ++k) {
    const double pivot = j[k - 1][k];
    if (pivot == 0.0) throw DegenerateError("hessenberg_reduction_check: zero pivot (some r_k = 1)");
    const double factor = j[k - 1][0] / pivot;
    for (std::size_t i = 0; i < n; ++i) j[i][0] -= factor * j[i][k];
    for (std::size_t i = 0; i < n; ++i) {
      double expected = 0.0;
      if (i >= k) {
        expected = r_at(i + 1);
        for (std::size_t l = k + 1; l <= i; ++l) expected *= 1.0 - r[l];
      }
      out.max_closed_form_error = std::max(out.max_closed_form_error, std::abs(j[i][0] - expected));
    }
    for (std::size_t i = 0; i < k; ++i) out.max_cleared_entry = std::max(out.max_cleared_entry, std::abs(j[i][0]));
  }
  out.final_element_error = std::abs(j[n - 1][0] - 1.0);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = row + 1; col < n; ++col) {
      // shifted column col holds original column col + 1; the last holds column 0
      const double v = col + 1 < n ? j[row][col + 1] : j[row][0];
      out.max_above_diagonal = std::max(out.max_above_diagonal, std::abs(v));
    }
  }
  out.pass = out.max_cleared_entry < kHessenbergTolerance && out.final_element_error < kHessenbergTolerance &&
             out.max_closed_form_error < kHessenbergTolerance && out.max_above_diagonal < kHessenbergTolerance;
  return out;
}

/// Random interior point: r_0 in (10h, 10], r_k in (10h, 1 - 10h).
inline std::vector<double> jacobian_point(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  RngStream rng(seed, {static_cast<std::uint64_t>(n), index, StreamKind::jacobian});
  const double margin = 10.0 * kFiniteDifferenceStep;
  std::vector<double> r(n);
  r[0] = margin + (10.0 - margin) * rng.uniform_open();
  for (std::size_t k = 1; k < n; ++k) r[k] = margin + (1.0 - 2.0 * margin) * rng.uniform_open();
  return r;
}

struct JacobianDimensionResult {
  std::size_t n = 0;
  std::size_t points = 0;
  double max_relative_error = 0.0;        // closed form vs finite-difference determinant
  double max_exact_relative_error = 0.0;  // closed form vs dual-number determinant
  double max_closed_form_error = 0.0;
  double max_final_element_error = 0.0;
  std::size_t reduction_failures = 0;
};

struct JacobianReport {
  std::uint64_t seed = 0;
  double relative_tolerance = 1e-5;
  std::vector<JacobianDimensionResult> dimensions;

  bool all_pass() const {
    return std::all_of(dimensions.begin(), dimensions.end(), [&](const JacobianDimensionResult& d) {
      return d.max_relative_error < relative_tolerance && d.reduction_failures == 0;
    });
  }
};

inline JacobianReport run_jacobian_check(std::size_t dim_max, std::size_t points, std::uint64_t seed,
                                         unsigned threads = 1) {
  if (dim_max < 2) throw ValidationError("jacobian check needs dim_max >= 2");
  JacobianReport report;
  report.seed = seed;
  for (std::size_t n = 2; n <= dim_max; ++n) {
    std::vector<double> rel(points), rel_exact(points), closed(points), final_err(points);
    std::vector<char> ok(points);
    parallel_for(points, threads, [&](std::size_t p) {
      const auto r = jacobian_point(n, seed, p);
      const double exact = jacobian_closed_form(r);
      rel[p] = std::abs(abs_determinant(jacobian_finite_difference(r)) - exact) / exact;
      rel_exact[p] = std::abs(abs_determinant(jacobian_exact(r)) - exact) / exact;
      const auto h = hessenberg_reduction_check(r);
      closed[p] = h.max_closed_form_error;
      final_err[p] = h.final_element_error;
      ok[p] = h.pass;
    });
    JacobianDimensionResult d;
    d.n = n;
    d.points = points;
    for (std::size_t p = 0; p < points; ++p) {
      d.max_relative_error = std::max(d.max_relative_error, rel[p]);
      d.max_exact_relative_error = std::max(d.max_exact_relative_error, rel_exact[p]);
      d.max_closed_form_error = std::max(d.max_closed_form_error, closed[p]);
      d.max_final_element_error = std::max(d.max_final_element_error, final_err[p]);
      d.reduction_failures += ok[p] ? 0 : 1;
    }
    report.dimensions.push_back(d);
  }
  return report;
}

}  // namespace haar_dial

#pragma once

// Quadrature checks that every sampling density integrates to one.

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "haar_dial/circuit.hpp"
#include "haar_dial/errors.hpp"
#include "haar_dial/sampler.hpp"
#include "haar_dial/stats.hpp"

namespace haar_dial {

inline constexpr double kMarginalNormTolerance = 1e-9;
inline constexpr double kUnitVectorNormTolerance = 1e-7;
inline constexpr std::size_t kUnitVectorMaxN = 8;

/// Adaptive Gauss-Kronrod (15 points, bisection depth 15) on [a, b].
template <class F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, 1e-14);
}

/// (n-1)! prod_{k=1..n-1} (1 - r_k)^(n-k-1), the density of a block's
/// reflectivities when the block emits a Haar-random unit vector.
inline double unit_vector_pdf(std::span<const double> r) {
  const std::size_t dims = r.size();
  double value = std::tgamma(static_cast<double>(dims) + 1.0);
  for (std::size_t k = 1; k <= dims; ++k) value *= std::pow(1.0 - r[k - 1], static_cast<double>(dims - k));
  return value;
}

/// Full tensor-product Gauss-Legendre integral of the unit-vector pdf over
/// the (n-1)-cube. Eight nodes per axis integrate degree <= 15 exactly.
inline double unit_vector_pdf_integral(std::size_t n) {
  if (n < 2) throw DomainError("unit_vector_pdf_integral: need n >= 2");
  using Rule = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> nodes, weights;
  for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
    const double x = Rule::abscissa()[k];
    const double w = Rule::weights()[k];
    nodes.push_back(0.5 + 0.5 * x);
    weights.push_back(0.5 * w);
    if (x != 0.0) {
      nodes.push_back(0.5 - 0.5 * x);
      weights.push_back(0.5 * w);
    }
  }
  const std::size_t dims = n - 1;
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> r(dims);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
      r[d] = nodes[idx[d]];
      w *= weights[idx[d]];
    }
    total += w * unit_vector_pdf(r);
    std::size_t d = 0;
    while (d < dims && ++idx[d] == nodes.size()) idx[d++] = 0;
    if (d == dims) break;
  }
  return total;
}

/// One record per marginal order e = 1..n_max-1 and density family, plus the
/// unit-vector pdf for n = 2..min(n_max, 8).
inline std::vector<TestRecord> pdf_normalization_check(std::size_t n_max) {
  if (n_max < 2) throw ValidationError("pdf normalization check needs n_max >= 2");
  std::vector<TestRecord> out;
  for (int e = 1; e < static_cast<int>(n_max); ++e) {
    const std::string order = " (n-i=" + std::to_string(e) + ")";
    const double r_int = integrate([e](double r) { return reflectivity_pdf_order(e, r); }, 0.0, 1.0);
    out.push_back(make_record("reflectivity pdf" + order, std::abs(r_int - 1.0), kMarginalNormTolerance));
    for (Convention c : {Convention::mzi_beamsplitter, Convention::mzi_directional_coupler}) {
      const double t_int = integrate([e, c](double t) { return theta_pdf(e, c, t); }, 0.0, kPi);
      out.push_back(make_record(std::string(to_string(c)) + " theta pdf" + order, std::abs(t_int - 1.0),
                                kMarginalNormTolerance));
    }
  }
  for (std::size_t n = 2; n <= std::min(n_max, kUnitVectorMaxN); ++n)
    out.push_back(make_record("unit-vector pdf (n=" + std::to_string(n) + ")",
                              std::abs(unit_vector_pdf_integral(n) - 1.0), kUnitVectorNormTolerance));
  return out;
}

}  // namespace haar_dial

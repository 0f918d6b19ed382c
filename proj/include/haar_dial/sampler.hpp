#pragma once

// Closed-form marginals of the mesh parameters and inverse-transform
// samplers for them.
//
// Coupler i of triangular block n has reflectivity density
//     P(r) = e (1 - r)^(e - 1),   e = n - i,
// and CDF F(r) = 1 - (1 - r)^e. An MZI realizes r through its internal
// phase theta: r = cos^2(theta/2) with beamsplitter halves and
// r = sin^2(theta/2) with directional couplers, which turns the density
// into e sin^(2e-1)(theta/2) cos(theta/2) and its mirror image.
// All phases are uniform on [0, 2 pi).

#include <cmath>
#include <cstdint>
#include <vector>

#include "haar_dial/circuit.hpp"
#include "haar_dial/errors.hpp"
#include "haar_dial/rng.hpp"

namespace haar_dial {

namespace detail {
inline int checked_order(int n, int i) {
  if (i < 1 || i >= n) throw DomainError("marginal: need 1 <= i < n");
  return n - i;
}
inline void check_order(int e) {
  if (e < 1) throw DomainError("marginal: order n - i must be >= 1");
}
}  // namespace detail

// --- reflectivity -----------------------------------------------------------

inline double reflectivity_pdf_order(int e, double r) {
  detail::check_order(e);
  if (r < 0.0 || r > 1.0) return 0.0;
  return e * std::pow(1.0 - r, e - 1);
}

inline double reflectivity_pdf(int n, int i, double r) {
  return reflectivity_pdf_order(detail::checked_order(n, i), r);
}

inline double reflectivity_cdf(int e, double r) {
  detail::check_order(e);
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - r, e);
}

inline double reflectivity_from_uniform(int e, double u) {
  detail::check_order(e);
  return 1.0 - std::pow(u, 1.0 / e);
}

inline double sample_reflectivity(int n, int i, RngStream& rng) {
  return reflectivity_from_uniform(detail::checked_order(n, i), rng.uniform_open());
}

// --- MZI internal phase -----------------------------------------------------

inline double theta_pdf(int e, Convention convention, double theta) {
  detail::check_order(e);
  if (theta < 0.0 || theta > kPi) return 0.0;
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  switch (convention) {
    case Convention::mzi_beamsplitter: return e * std::pow(s, 2 * e - 1) * c;
    case Convention::mzi_directional_coupler: return e * std::pow(c, 2 * e - 1) * s;
    case Convention::reflectivity: break;
  }
  throw DomainError("theta_pdf: reflectivity convention has no theta");
}

inline double theta_cdf(int e, Convention convention, double theta) {
  detail::check_order(e);
  if (theta <= 0.0) return 0.0;
  if (theta >= kPi) return 1.0;
  switch (convention) {
    case Convention::mzi_beamsplitter: return std::pow(std::sin(theta / 2.0), 2 * e);
    case Convention::mzi_directional_coupler: return 1.0 - std::pow(std::cos(theta / 2.0), 2 * e);
    case Convention::reflectivity: break;
  }
  throw DomainError("theta_cdf: reflectivity convention has no theta");
}

inline double theta_from_uniform(int e, Convention convention, double u) {
  detail::check_order(e);
  const double w = std::pow(u, 1.0 / (2.0 * e));
  switch (convention) {
    case Convention::mzi_beamsplitter: return 2.0 * std::asin(w);
    case Convention::mzi_directional_coupler: return 2.0 * std::acos(w);
    case Convention::reflectivity: break;
  }
  throw DomainError("theta_from_uniform: reflectivity convention has no theta");
}

inline double sample_theta(int n, int i, Convention convention, RngStream& rng) {
  return theta_from_uniform(detail::checked_order(n, i), convention, rng.uniform_open());
}

// --- phases -----------------------------------------------------------------

inline double sample_phase(RngStream& rng) {
  const double phi = kTwoPi * rng.uniform_open();
  return phi < kTwoPi ? phi : 0.0;
}

// --- whole circuits ---------------------------------------------------------

/// Stored component value for a marginal of order e driven by uniform u.
/// The original triangular scheme stores the mirrored reflectivity 1 - r;
/// for MZIs that is the same as drawing theta with the other coupler's law.
inline double component_value_from_uniform(int e, Scheme scheme, Convention convention, double u) {
  const bool mirrored = scheme == Scheme::triangular_original;
  switch (convention) {
    case Convention::reflectivity: {
      // 1 - r = u^(1/e) exactly, so take it directly instead of subtracting
      return mirrored ? std::pow(u, 1.0 / e) : reflectivity_from_uniform(e, u);
    }
    case Convention::mzi_beamsplitter:
      return theta_from_uniform(e, mirrored ? Convention::mzi_directional_coupler : convention, u);
    case Convention::mzi_directional_coupler:
      return theta_from_uniform(e, mirrored ? Convention::mzi_beamsplitter : convention, u);
  }
  throw DomainError("unknown convention");
}

inline StreamId coupler_stream(int n, int i) {
  return {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i), StreamKind::coupler};
}
inline StreamId phase_stream(int n, int i) {
  return {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i), StreamKind::phase};
}
inline StreamId terminal_stream(int n) {
  return {static_cast<std::uint64_t>(n), 0, StreamKind::terminal};
}

/// Draw every parameter of an m-mode circuit. Each parameter comes from its
/// own stream, so the result does not depend on the order of draws.
inline CircuitSpec sample_circuit(std::size_t m, Scheme scheme, Convention convention, std::uint64_t seed) {
  if (m < 1) throw DomainError("sample_circuit: need m >= 1");
  CircuitSpec c;
  c.modes = m;
  c.scheme = scheme;
  c.convention = convention;
  c.seed = seed;
  const int mi = static_cast<int>(m);
  c.components.reserve(m * (m - 1) / 2);
  for (int n = 2; n <= mi; ++n) {
    for (int i = 1; i < n; ++i) {
      RngStream coupler(seed, coupler_stream(n, i));
      RngStream phase(seed, phase_stream(n, i));
      const int e = marginal_order(scheme, n, i, mi);
      c.components.push_back(
          {n, i, component_value_from_uniform(e, scheme, convention, coupler.uniform_open()),
           sample_phase(phase)});
    }
  }
  c.terminal_phases.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    RngStream terminal(seed, terminal_stream(static_cast<int>(m - j)));
    c.terminal_phases[j] = sample_phase(terminal);
  }
  return c;
}

}  // namespace haar_dial

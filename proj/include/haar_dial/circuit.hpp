#pragma once

// Mesh circuits (triangular-adjacent, triangular-original, rectangular) and
// synthesis of their m x m unitary from component parameters.
//
// A circuit is a product of blocks. Block n (2 <= n <= m) holds n-1
// couplers, each followed or preceded by one phase shifter, plus one
// residual ("terminal") phase. terminal_phases[m - n] belongs to block n,
// so terminal_phases[m - 1] is the lone phase of block 1.
//
// Triangular schemes: U = R_m ... R_2 R_1, block n acting on modes m-n..m-1.
//   adjacent: coupler i joins modes (m-n+i-1, m-n+i); its phase follows it
//             on mode m-n+i-1; the terminal phase sits on mode m-1.
//   original: coupler i joins modes (m-n, m-n+i) and stores the mirrored
//             reflectivity 1-r; its phase follows it on mode m-n+i; the
//             terminal phase sits on mode m-n.
// Rectangular scheme: blocks with n = m (mod 2) come first in ascending n,
//   each a diagonal of couplers on (m-n+i-1, m-n+i) with the phase in front
//   on mode m-n+i-1. Then all terminal phases as one diagonal layer, mode j
//   carrying terminal_phases[j]. Then the remaining blocks in descending n,
//   coupler i joining (i-1, i) followed by its phase on mode i-1. Inside a
//   block couplers fire in index order. This is the compact mesh with m
//   columns; row 3 of the six-mode mesh holds blocks 4, 6, 5 in that order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "haar_dial/errors.hpp"
#include "haar_dial/linalg.hpp"

namespace haar_dial {

enum class Scheme { triangular_adjacent, triangular_original, rectangular };
enum class Convention { reflectivity, mzi_beamsplitter, mzi_directional_coupler };

inline constexpr Scheme kAllSchemes[] = {Scheme::triangular_adjacent, Scheme::triangular_original,
                                         Scheme::rectangular};
inline constexpr Convention kAllConventions[] = {
    Convention::reflectivity, Convention::mzi_beamsplitter, Convention::mzi_directional_coupler};

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::triangular_adjacent: return "triangular-adjacent";
    case Scheme::triangular_original: return "triangular-original";
    case Scheme::rectangular: return "rectangular";
  }
  return "?";
}

inline std::string_view to_string(Convention c) {
  switch (c) {
    case Convention::reflectivity: return "reflectivity";
    case Convention::mzi_beamsplitter: return "mzi-beamsplitter";
    case Convention::mzi_directional_coupler: return "mzi-directional-coupler";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view text) {
  for (Scheme s : kAllSchemes)
    if (to_string(s) == text) return s;
  throw ValidationError("unknown scheme '" + std::string(text) + "'");
}

inline Convention parse_convention(std::string_view text) {
  for (Convention c : kAllConventions)
    if (to_string(c) == text) return c;
  throw ValidationError("unknown convention '" + std::string(text) + "'");
}

inline bool is_mzi(Convention c) { return c != Convention::reflectivity; }

struct ComponentParam {
  int block_n = 2;
  int index_i = 1;
  double value = 0.0;  // reflectivity r, or MZI phase theta
  double phase_phi = 0.0;

  friend bool operator==(const ComponentParam&, const ComponentParam&) = default;
};

struct CircuitSpec {
  std::size_t modes = 1;
  Scheme scheme = Scheme::triangular_adjacent;
  Convention convention = Convention::reflectivity;
  std::optional<std::uint64_t> seed;
  std::vector<ComponentParam> components;
  std::vector<double> terminal_phases;

  friend bool operator==(const CircuitSpec&, const CircuitSpec&) = default;
};

/// Block-internal index permutation of the rectangular scheme. For even m:
/// odd numbers of 1..n-1 descending, then even ones ascending; odd m swaps
/// the parities. Coupler i of rectangular block n is distributed like
/// coupler s(i) of triangular block n.
inline std::vector<int> clements_sequence(int n, int m) {
  if (n < 2 || n > m) throw DomainError("clements_sequence: need 2 <= n <= m");
  const int descending_parity = (m % 2 == 0) ? 1 : 0;
  std::vector<int> s;
  s.reserve(static_cast<std::size_t>(n - 1));
  for (int k = n - 1; k >= 1; --k)
    if (k % 2 == descending_parity) s.push_back(k);
  for (int k = 1; k <= n - 1; ++k)
    if (k % 2 != descending_parity) s.push_back(k);
  return s;
}

/// Exponent n - i of the reflectivity marginal (n-i)(1-r)^(n-i-1) that
/// drives coupler (n, i) in the given scheme.
inline int marginal_order(Scheme scheme, int n, int i, int m) {
  if (scheme == Scheme::rectangular) return n - clements_sequence(n, m)[static_cast<std::size_t>(i - 1)];
  return n - i;
}

// ---------------------------------------------------------------------------
// Two-mode gates

inline ComplexMatrix embed_two_mode(const ComplexMatrix& gate, std::size_t mode_a, std::size_t mode_b,
                                    std::size_t m) {
  if (gate.rows() != 2 || gate.cols() != 2) throw ShapeError("embed_two_mode: gate must be 2x2");
  if (mode_a >= m || mode_b >= m || mode_a == mode_b)
    throw ShapeError("embed_two_mode: modes must be distinct and < m");
  ComplexMatrix out = ComplexMatrix::identity(m);
  out(mode_a, mode_a) = gate(0, 0);
  out(mode_a, mode_b) = gate(0, 1);
  out(mode_b, mode_a) = gate(1, 0);
  out(mode_b, mode_b) = gate(1, 1);
  return out;
}

/// B(r) = sqrt(r) sigma_z + sqrt(1-r) sigma_x
inline ComplexMatrix beamsplitter(double r) {
  const double a = std::sqrt(r);
  const double b = std::sqrt(1.0 - r);
  return ComplexMatrix{{a, b}, {b, -a}};
}

inline void check_component_value(double value, Convention convention) {
  if (convention == Convention::reflectivity) {
    if (!(value >= 0.0 && value <= 1.0)) throw DomainError("reflectivity outside [0, 1]");
  } else if (!(value >= 0.0 && value <= kPi)) {
    throw DomainError("MZI phase outside [0, pi]");
  }
}

/// 2x2 transfer matrix of a coupler. MZI forms sandwich diag(e^{i theta}, 1)
/// between two balanced couplers: H = B(1/2) for the beamsplitter build,
/// D = (I + i sigma_x)/sqrt(2) for directional couplers.
inline ComplexMatrix component_gate(double value, Convention convention) {
  check_component_value(value, convention);
  switch (convention) {
    case Convention::reflectivity:
      return beamsplitter(value);
    case Convention::mzi_beamsplitter: {
      // H diag(e^{it},1) H = e^{it/2} [[cos t/2, i sin t/2], [i sin t/2, cos t/2]]
      const Complex g = std::polar(1.0, value / 2.0);
      const Complex c = g * std::cos(value / 2.0);
      const Complex s = g * Complex{0.0, std::sin(value / 2.0)};
      return ComplexMatrix{{c, s}, {s, c}};
    }
    case Convention::mzi_directional_coupler: {
      // D diag(e^{it},1) D = i e^{it/2} [[sin t/2, cos t/2], [cos t/2, -sin t/2]]
      const Complex g = Complex{0.0, 1.0} * std::polar(1.0, value / 2.0);
      const Complex s = g * std::sin(value / 2.0);
      const Complex c = g * std::cos(value / 2.0);
      return ComplexMatrix{{s, c}, {c, -s}};
    }
  }
  throw DomainError("component_gate: unknown convention");
}

inline ComplexMatrix component_gate(const ComponentParam& p, Convention convention) {
  return component_gate(p.value, convention);
}

/// Power reflectivity |gate_00|^2 of a coupler setting.
inline double reflectivity_of(double value, Convention convention) {
  switch (convention) {
    case Convention::reflectivity: return value;
    case Convention::mzi_beamsplitter: return std::pow(std::cos(value / 2.0), 2);
    case Convention::mzi_directional_coupler: return std::pow(std::sin(value / 2.0), 2);
  }
  return value;
}

// ---------------------------------------------------------------------------
// Mesh steps: the flattened, time-ordered list of optical operations

struct MeshStep {
  enum class Kind { coupler, phase };
  Kind kind = Kind::phase;
  std::size_t mode_a = 0;  // coupler: first mode (row 0 of the 2x2 gate); phase: the mode
  std::size_t mode_b = 0;
  double value = 0.0;
  double phi = 0.0;
  std::size_t phase_mode = 0;
  bool phase_first = false;  // coupler phase shifter applied before the coupler
  int block_n = 0;
  int index_i = 0;

  static MeshStep phase_only(std::size_t mode, double phi, int block_n) {
    MeshStep s;
    s.kind = Kind::phase;
    s.mode_a = s.mode_b = s.phase_mode = mode;
    s.phi = phi;
    s.block_n = block_n;
    return s;
  }
};

/// Rectangular blocks with n = m (mod 2) sit before the terminal phase layer.
inline bool rectangular_leading_block(int n, std::size_t m) {
  return (static_cast<std::size_t>(n) % 2) == (m % 2);
}

inline bool phase_in_range(double phi) { return phi >= 0.0 && phi < kTwoPi; }

/// Steps of block n. For triangular schemes the terminal phase is part of the
/// block and must be supplied; rectangular blocks carry only their couplers
/// (their terminal phases form the shared middle layer) and must not get one.
inline std::vector<MeshStep> block_steps(int n, std::span<const ComponentParam> params,
                                         std::optional<double> terminal_phase, std::size_t m,
                                         Scheme scheme) {
  if (n < 1 || static_cast<std::size_t>(n) > m) throw ShapeError("block_steps: need 1 <= n <= m");
  if (params.size() != static_cast<std::size_t>(n - 1))
    throw ShapeError("block " + std::to_string(n) + " needs " + std::to_string(n - 1) +
                     " components, got " + std::to_string(params.size()));
  if (scheme == Scheme::rectangular && terminal_phase)
    throw ValidationError("rectangular blocks take no terminal phase; it lives in the middle layer");
  if (scheme != Scheme::rectangular && !terminal_phase)
    throw ShapeError("triangular block " + std::to_string(n) + " needs a terminal phase");

  const std::size_t top = m - static_cast<std::size_t>(n);
  std::vector<MeshStep> steps;
  for (int i = 1; i < n; ++i) {
    const ComponentParam& p = params[static_cast<std::size_t>(i - 1)];
    if (p.block_n != n || p.index_i != i)
      throw ShapeError("block " + std::to_string(n) + ": component labelled (" +
                       std::to_string(p.block_n) + "," + std::to_string(p.index_i) +
                       ") in slot " + std::to_string(i));
    const auto ui = static_cast<std::size_t>(i);
    MeshStep s;
    s.kind = MeshStep::Kind::coupler;
    s.value = p.value;
    s.phi = p.phase_phi;
    s.block_n = n;
    s.index_i = i;
    switch (scheme) {
      case Scheme::triangular_adjacent:
        s.mode_a = top + ui - 1;
        s.mode_b = top + ui;
        s.phase_mode = s.mode_a;
        break;
      case Scheme::triangular_original:
        s.mode_a = top;
        s.mode_b = top + ui;
        s.phase_mode = s.mode_b;
        break;
      case Scheme::rectangular:
        if (rectangular_leading_block(n, m)) {
          s.mode_a = top + ui - 1;
          s.mode_b = top + ui;
          s.phase_first = true;
        } else {
          s.mode_a = ui - 1;
          s.mode_b = ui;
        }
        s.phase_mode = s.mode_a;
        break;
    }
    steps.push_back(s);
  }
  if (terminal_phase) {
    const std::size_t mode = scheme == Scheme::triangular_original ? top : m - 1;
    steps.push_back(MeshStep::phase_only(mode, *terminal_phase, n));
  }
  return steps;
}

inline void validate(const CircuitSpec& c) {
  const std::size_t m = c.modes;
  if (m < 1) throw ValidationError("circuit needs at least one mode");
  if (c.components.size() != m * (m - 1) / 2)
    throw ValidationError("circuit on " + std::to_string(m) + " modes needs " +
                          std::to_string(m * (m - 1) / 2) + " components, has " +
                          std::to_string(c.components.size()));
  if (c.terminal_phases.size() != m)
    throw ValidationError("circuit needs one terminal phase per mode");
  std::vector<std::vector<bool>> seen(m + 1);
  for (std::size_t n = 0; n <= m; ++n) seen[n].assign(n + 1, false);
  for (const ComponentParam& p : c.components) {
    if (p.block_n < 2 || static_cast<std::size_t>(p.block_n) > m || p.index_i < 1 ||
        p.index_i >= p.block_n)
      throw ValidationError("component label (" + std::to_string(p.block_n) + "," +
                            std::to_string(p.index_i) + ") out of range");
    auto&& flag = seen[static_cast<std::size_t>(p.block_n)][static_cast<std::size_t>(p.index_i)];
    if (flag)
      throw ValidationError("duplicate component (" + std::to_string(p.block_n) + "," +
                            std::to_string(p.index_i) + ")");
    flag = true;
    try {
      check_component_value(p.value, c.convention);
    } catch (const DomainError& e) {
      throw ValidationError(std::string("component value: ") + e.what());
    }
    if (!phase_in_range(p.phase_phi)) throw ValidationError("component phase outside [0, 2pi)");
  }
  for (double phi : c.terminal_phases)
    if (!phase_in_range(phi)) throw ValidationError("terminal phase outside [0, 2pi)");
}

/// Components of block n in index order (circuit must be valid).
inline std::vector<ComponentParam> block_components(const CircuitSpec& c, int n) {
  std::vector<ComponentParam> out(static_cast<std::size_t>(n - 1));
  for (const ComponentParam& p : c.components)
    if (p.block_n == n) out[static_cast<std::size_t>(p.index_i - 1)] = p;
  return out;
}

/// Block n values in application order for the scheme.
inline std::vector<int> block_order(std::size_t m, Scheme scheme) {
  std::vector<int> order;
  const int mi = static_cast<int>(m);
  if (scheme != Scheme::rectangular) {
    for (int n = 1; n <= mi; ++n) order.push_back(n);
    return order;
  }
  for (int n = 2; n <= mi; ++n)
    if (rectangular_leading_block(n, m)) order.push_back(n);
  order.push_back(1);  // stands for the terminal phase layer
  for (int n = mi; n >= 2; --n)
    if (!rectangular_leading_block(n, m)) order.push_back(n);
  return order;
}

inline std::vector<MeshStep> circuit_steps(const CircuitSpec& c) {
  validate(c);
  const std::size_t m = c.modes;
  std::vector<MeshStep> steps;
  for (int n : block_order(m, c.scheme)) {
    if (c.scheme == Scheme::rectangular && n == 1) {
      for (std::size_t j = 0; j < m; ++j)
        steps.push_back(MeshStep::phase_only(j, c.terminal_phases[j], static_cast<int>(m - j)));
      continue;
    }
    const auto comps = block_components(c, n);
    std::optional<double> terminal;
    if (c.scheme != Scheme::rectangular) terminal = c.terminal_phases[m - static_cast<std::size_t>(n)];
    auto block = block_steps(n, comps, terminal, m, c.scheme);
    steps.insert(steps.end(), block.begin(), block.end());
  }
  return steps;
}

/// Left-multiply u by the operation of one step.
inline void apply_step(ComplexMatrix& u, const MeshStep& s, Convention convention) {
  const std::size_t cols = u.cols();
  auto phase_row = [&](std::size_t row, double phi) {
    const Complex ph = std::polar(1.0, phi);
    for (std::size_t j = 0; j < cols; ++j) u(row, j) *= ph;
  };
  if (s.kind == MeshStep::Kind::phase) {
    phase_row(s.mode_a, s.phi);
    return;
  }
  if (s.phase_first) phase_row(s.phase_mode, s.phi);
  const ComplexMatrix g = component_gate(s.value, convention);
  for (std::size_t j = 0; j < cols; ++j) {
    const Complex a = u(s.mode_a, j);
    const Complex b = u(s.mode_b, j);
    u(s.mode_a, j) = g(0, 0) * a + g(0, 1) * b;
    u(s.mode_b, j) = g(1, 0) * a + g(1, 1) * b;
  }
  if (!s.phase_first) phase_row(s.phase_mode, s.phi);
}

inline ComplexMatrix apply_steps(std::span<const MeshStep> steps, std::size_t m, Convention convention) {
  ComplexMatrix u = ComplexMatrix::identity(m);
  for (const MeshStep& s : steps) apply_step(u, s, convention);
  return u;
}

/// m x m matrix of a single block, identity outside its modes.
inline ComplexMatrix build_block(int n, std::span<const ComponentParam> params,
                                 std::optional<double> terminal_phase, std::size_t m, Scheme scheme,
                                 Convention convention) {
  for (const ComponentParam& p : params) check_component_value(p.value, convention);
  const auto steps = block_steps(n, params, terminal_phase, m, scheme);
  return apply_steps(steps, m, convention);
}

inline ComplexMatrix build_unitary(const CircuitSpec& c) {
  const auto steps = circuit_steps(c);
  return apply_steps(steps, c.modes, c.convention);
}

// ---------------------------------------------------------------------------
// Rectangular mesh layout

struct MeshSlot {
  int block_n = 0;
  int index_i = 0;
  int label = 0;   // s(i): which triangular marginal this coupler follows
  int row = 0;     // row k mixes modes k-1 and k
  int column = 0;  // 1-based firing order; couplers in one column commute
};

/// Mesh positions of every rectangular coupler, columns assigned as early as
/// the couplers' mode dependencies allow.
inline std::vector<MeshSlot> clements_layout(std::size_t m) {
  if (m < 2) throw DomainError("clements_layout: need m >= 2");
  std::vector<int> busy_until(m, 0);
  std::vector<MeshSlot> slots;
  for (int n : block_order(m, Scheme::rectangular)) {
    if (n == 1) continue;
    std::vector<ComponentParam> dummy;
    for (int i = 1; i < n; ++i) dummy.push_back({n, i, 0.0, 0.0});
    const auto seq = clements_sequence(n, static_cast<int>(m));
    for (const MeshStep& s : block_steps(n, dummy, std::nullopt, m, Scheme::rectangular)) {
      const int column = std::max(busy_until[s.mode_a], busy_until[s.mode_b]) + 1;
      busy_until[s.mode_a] = busy_until[s.mode_b] = column;
      slots.push_back({n, s.index_i, seq[static_cast<std::size_t>(s.index_i - 1)],
                       static_cast<int>(s.mode_b), column});
    }
  }
  return slots;
}

}  // namespace haar_dial

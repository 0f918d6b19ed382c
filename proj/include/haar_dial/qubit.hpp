#pragma once

// Compilation of a 2^p-mode MZI circuit into p-qubit gates.
//
// Mode k is the basis state whose big-endian binary expansion is k: qubit 0
// is the most significant bit, qubit p-1 (the "final" qubit) the least.
// The gate set is H, X, PHI(phi) = diag(e^{i phi}, e^{-i phi}) and
// PHIBAR(phi) = diag(e^{-i phi}, e^{i phi}), each optionally conditioned on
// other qubits taking given values.
//
// A coupler on modes (a, b) is handled in three stages:
//  1. routing: fully controlled X gates permute basis states so that a lands
//     on 2c and b on 2c+1, a pair differing only in the final qubit;
//  2. the MZI and its phase shifter act on the final qubit, PHI/PHIBAR being
//     controlled on the first p-1 qubits spelling c (H is left uncontrolled,
//     it cancels on every other pair);
//  3. the routing is undone.
// PHI-type gates only realize the 2x2 action up to a scalar, and that scalar
// is not global: it multiplies only the pair's two states. prefix_phase()
// removes it exactly, so every compiled step equals its mode operation up to
// one overall phase.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "haar_dial/circuit.hpp"
#include "haar_dial/errors.hpp"
#include "haar_dial/linalg.hpp"

namespace haar_dial {

enum class GateKind { H, X, PHI, PHIBAR };

inline std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::PHI: return "PHI";
    case GateKind::PHIBAR: return "PHIBAR";
  }
  return "?";
}

inline GateKind parse_gate_kind(std::string_view text) {
  for (GateKind k : {GateKind::H, GateKind::X, GateKind::PHI, GateKind::PHIBAR})
    if (to_string(k) == text) return k;
  throw ValidationError("unknown gate kind '" + std::string(text) + "'");
}

struct Control {
  std::size_t qubit = 0;
  int value = 1;
  friend bool operator==(const Control&, const Control&) = default;
};

struct QubitGate {
  GateKind kind = GateKind::H;
  std::size_t target = 0;
  std::vector<Control> controls;
  std::optional<double> phi;
  friend bool operator==(const QubitGate&, const QubitGate&) = default;
};

struct GateList {
  std::size_t qubits = 0;
  std::vector<QubitGate> gates;
  friend bool operator==(const GateList&, const GateList&) = default;
};

inline void validate(const GateList& g) {
  for (const QubitGate& gate : g.gates) {
    if (gate.target >= g.qubits) throw ValidationError("gate target out of range");
    const bool wants_phi = gate.kind == GateKind::PHI || gate.kind == GateKind::PHIBAR;
    if (wants_phi != gate.phi.has_value()) throw ValidationError("phi must be present exactly for PHI/PHIBAR");
    for (std::size_t a = 0; a < gate.controls.size(); ++a) {
      const Control& c = gate.controls[a];
      if (c.qubit >= g.qubits) throw ValidationError("control qubit out of range");
      if (c.qubit == gate.target) throw ValidationError("control coincides with target");
      if (c.value != 0 && c.value != 1) throw ValidationError("control value must be 0 or 1");
      for (std::size_t b = a + 1; b < gate.controls.size(); ++b)
        if (gate.controls[b].qubit == c.qubit) throw ValidationError("duplicate control qubit");
    }
  }
}

// --- mode labels -------------------------------------------------------------

inline std::size_t bit_of(std::size_t mode, std::size_t qubit, std::size_t p) {
  return (mode >> (p - 1 - qubit)) & 1u;
}

inline std::size_t qubit_mask(std::size_t qubit, std::size_t p) { return std::size_t{1} << (p - 1 - qubit); }

inline std::string mode_to_bits(std::size_t mode, std::size_t p) {
  if (p >= 8 * sizeof(std::size_t) || mode >= (std::size_t{1} << p))
    throw DomainError("mode_to_bits: mode " + std::to_string(mode) + " needs more than " +
                      std::to_string(p) + " qubits");
  std::string out(p, '0');
  for (std::size_t q = 0; q < p; ++q)
    if (bit_of(mode, q, p)) out[q] = '1';
  return out;
}

/// Number of qubits p with 2^p = m; throws unless m is a power of two >= 2.
inline std::size_t qubits_for_modes(std::size_t m) {
  if (m < 2 || (m & (m - 1)) != 0)
    throw DomainError("qubit compilation needs a power-of-two mode count >= 2, got " + std::to_string(m));
  std::size_t p = 0;
  while ((std::size_t{1} << p) < m) ++p;
  return p;
}

// --- building blocks ---------------------------------------------------------

/// Controls that pin every qubit except `skip` to its value in `mode`.
inline std::vector<Control> controls_matching(std::size_t mode, std::size_t p, std::size_t skip) {
  std::vector<Control> out;
  for (std::size_t q = 0; q < p; ++q)
    if (q != skip) out.push_back({q, static_cast<int>(bit_of(mode, q, p))});
  return out;
}

inline QubitGate phase_gate(GateKind kind, std::size_t target, std::vector<Control> controls, double phi) {
  return {kind, target, std::move(controls), phi};
}

/// X gates taking mode a to 2c and mode b to 2c+1, c = a / 2. Each gate is
/// fully controlled, so it swaps exactly two basis states.
inline std::vector<QubitGate> route_pair(std::size_t a, std::size_t b, std::size_t p) {
  if (a >= b) throw DomainError("route_pair: need mode_a < mode_b");
  if (p == 0 || b >= (std::size_t{1} << p)) throw DomainError("route_pair: modes out of range");
  const std::size_t final_q = p - 1;
  std::vector<QubitGate> out;
  if (a & 1u) out.push_back({GateKind::X, final_q, controls_matching(a, p, final_q), std::nullopt});
  const std::size_t dest = (a & ~std::size_t{1}) | 1u;
  std::size_t cur = b;
  // final bit first: afterwards every intermediate state is odd, so it can
  // never collide with a's image 2c
  std::vector<std::size_t> order{final_q};
  for (std::size_t q = 0; q < final_q; ++q) order.push_back(q);
  for (std::size_t q : order) {
    if (bit_of(cur, q, p) == bit_of(dest, q, p)) continue;
    out.push_back({GateKind::X, q, controls_matching(cur, p, q), std::nullopt});
    cur ^= qubit_mask(q, p);
  }
  return out;
}

/// Gates multiplying every basis state that satisfies `controls` by
/// e^{i beta}. With no controls the phase is global and nothing is emitted.
/// Otherwise the last control qubit is swapped into the final position, a
/// PHI/PHIBAR on the final qubit conditioned on the remaining controls adds
/// e^{i beta} to the wanted half and e^{-i beta/2} overall, and the leftover
/// e^{-i beta/2} on the remaining controls is removed recursively.
inline void prefix_phase(double beta, std::vector<Control> controls, std::size_t p, std::vector<QubitGate>& out) {
  if (controls.empty() || beta == 0.0) return;
  const std::size_t final_q = p - 1;
  const Control last = controls.back();
  controls.pop_back();
  auto swap_with_final = [&](std::size_t q) {
    out.push_back({GateKind::X, final_q, {{q, 1}}, std::nullopt});
    out.push_back({GateKind::X, q, {{final_q, 1}}, std::nullopt});
    out.push_back({GateKind::X, final_q, {{q, 1}}, std::nullopt});
  };
  const bool moved = last.qubit != final_q;
  if (moved) swap_with_final(last.qubit);
  out.push_back(phase_gate(last.value == 0 ? GateKind::PHI : GateKind::PHIBAR, final_q, controls, beta / 2.0));
  if (moved) swap_with_final(last.qubit);
  prefix_phase(beta / 2.0, std::move(controls), p, out);
}

/// Phase e^{i phi} on a single mode.
inline void compile_mode_phase(std::size_t mode, double phi, std::size_t p, std::vector<QubitGate>& out) {
  const std::size_t final_q = p - 1;
  auto controls = controls_matching(mode, p, final_q);
  const GateKind kind = (mode & 1u) ? GateKind::PHIBAR : GateKind::PHI;
  out.push_back(phase_gate(kind, final_q, controls, phi / 2.0));
  prefix_phase(phi / 2.0, std::move(controls), p, out);
}

/// MZI on modes (a, b) with its phase shifter e^{i phi} on phase_mode
/// (a or b), applied after the MZI unless phase_first is set.
inline std::vector<QubitGate> compile_component(std::size_t a, std::size_t b, double theta, double phi,
                                                std::size_t p,
                                                Convention convention = Convention::mzi_beamsplitter,
                                                std::optional<std::size_t> phase_mode = std::nullopt,
                                                bool phase_first = false) {
  if (a == b) throw DomainError("compile_component: modes must differ");
  if (!is_mzi(convention)) throw DomainError("compile_component: needs an MZI convention");
  check_component_value(theta, convention);
  const std::size_t pm = phase_mode.value_or(a);
  if (pm != a && pm != b) throw DomainError("compile_component: phase must sit on one of the two modes");

  const auto route = route_pair(a, b, p);
  const std::size_t final_q = p - 1;
  const std::size_t pair_base = a & ~std::size_t{1};
  const auto pair_controls = controls_matching(pair_base, p, final_q);

  std::vector<QubitGate> out(route.begin(), route.end());
  auto phase = [&] {
    out.push_back(phase_gate(pm == a ? GateKind::PHI : GateKind::PHIBAR, final_q, pair_controls, phi / 2.0));
  };
  auto hadamard = [&] { out.push_back({GateKind::H, final_q, {}, std::nullopt}); };
  auto dc_half = [&] {  // D = H PHI(pi/4) H
    hadamard();
    out.push_back(phase_gate(GateKind::PHI, final_q, pair_controls, kPi / 4.0));
    hadamard();
  };

  if (phase_first) phase();
  if (convention == Convention::mzi_beamsplitter) hadamard();
  else dc_half();
  out.push_back(phase_gate(GateKind::PHI, final_q, pair_controls, theta / 2.0));
  if (convention == Convention::mzi_beamsplitter) hadamard();
  else dc_half();
  if (!phase_first) phase();
  // the pair picked up e^{-i (theta + phi)/2}
  prefix_phase((theta + phi) / 2.0, pair_controls, p, out);

  out.insert(out.end(), route.rbegin(), route.rend());
  return out;
}

inline std::vector<QubitGate> compile_step(const MeshStep& s, Convention convention, std::size_t p) {
  if (s.kind == MeshStep::Kind::phase) {
    std::vector<QubitGate> out;
    compile_mode_phase(s.mode_a, s.phi, p, out);
    return out;
  }
  return compile_component(s.mode_a, s.mode_b, s.value, s.phi, p, convention, s.phase_mode, s.phase_first);
}

inline GateList compile_circuit(const CircuitSpec& c) {
  const std::size_t p = qubits_for_modes(c.modes);
  if (!is_mzi(c.convention)) throw DomainError("qubit compilation needs an MZI convention");
  GateList out;
  out.qubits = p;
  for (const MeshStep& s : circuit_steps(c)) {
    auto gates = compile_step(s, c.convention, p);
    out.gates.insert(out.gates.end(), gates.begin(), gates.end());
  }
  return out;
}

// --- evaluation --------------------------------------------------------------

inline ComplexMatrix gate_matrix(const QubitGate& g) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::H: return ComplexMatrix{{s, s}, {s, -s}};
    case GateKind::X: return ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}};
    case GateKind::PHI: return ComplexMatrix{{std::polar(1.0, *g.phi), 0.0}, {0.0, std::polar(1.0, -*g.phi)}};
    case GateKind::PHIBAR: return ComplexMatrix{{std::polar(1.0, -*g.phi), 0.0}, {0.0, std::polar(1.0, *g.phi)}};
  }
  throw DomainError("unknown gate kind");
}

/// Left-multiply u (2^p rows) by one gate.
inline void apply_gate(ComplexMatrix& u, const QubitGate& g, std::size_t p) {
  const ComplexMatrix m = gate_matrix(g);
  const std::size_t dim = std::size_t{1} << p;
  const std::size_t tmask = qubit_mask(g.target, p);
  for (std::size_t s = 0; s < dim; ++s) {
    if (s & tmask) continue;
    bool active = true;
    for (const Control& c : g.controls)
      if (bit_of(s, c.qubit, p) != static_cast<std::size_t>(c.value)) active = false;
    if (!active) continue;
    const std::size_t t = s | tmask;
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const Complex x0 = u(s, j), x1 = u(t, j);
      u(s, j) = m(0, 0) * x0 + m(0, 1) * x1;
      u(t, j) = m(1, 0) * x0 + m(1, 1) * x1;
    }
  }
}

inline ComplexMatrix gates_to_unitary(const GateList& g) {
  validate(g);
  ComplexMatrix u = ComplexMatrix::identity(std::size_t{1} << g.qubits);
  for (const QubitGate& gate : g.gates) apply_gate(u, gate, g.qubits);
  return u;
}

/// True iff max |a - c b| <= tol for the unit scalar c that aligns the
/// entries where b is largest.
inline bool equal_up_to_global_phase(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("equal_up_to_global_phase: shape mismatch");
  if (a.entries().empty()) return true;
  std::size_t k = 0;
  for (std::size_t i = 1; i < b.entries().size(); ++i)
    if (std::abs(b.entries()[i]) > std::abs(b.entries()[k])) k = i;
  const Complex ratio = b.entries()[k] == Complex{} ? Complex{1.0, 0.0} : a.entries()[k] / b.entries()[k];
  const Complex c = std::abs(ratio) > 0.0 ? ratio / std::abs(ratio) : Complex{1.0, 0.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    worst = std::max(worst, std::abs(a.entries()[i] - c * b.entries()[i]));
  return worst <= tol;
}

}  // namespace haar_dial

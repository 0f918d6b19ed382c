#include <gtest/gtest.h>

#include <set>

#include "haar_dial/qubit.hpp"
#include "haar_dial/stats.hpp"
#include "haar_dial/sampler.hpp"
#include "oracles.hpp"

using namespace haar_dial;

namespace {

// Dense 2^p matrix of one controlled gate, entry by entry.
ComplexMatrix dense_gate(const QubitGate& g, std::size_t p) {
  const std::size_t dim = std::size_t{1} << p;
  const ComplexMatrix m = gate_matrix(g);
  auto bit = [p](std::size_t s, std::size_t q) { return (s >> (p - 1 - q)) & 1u; };
  ComplexMatrix out(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    bool active = true;
    for (const auto& c : g.controls) active = active && bit(col, c.qubit) == std::size_t(c.value);
    for (std::size_t row = 0; row < dim; ++row) {
      bool same_elsewhere = true;
      for (std::size_t q = 0; q < p; ++q)
        if (q != g.target && bit(row, q) != bit(col, q)) same_elsewhere = false;
      if (!same_elsewhere) continue;
      if (active) out(row, col) = m(bit(row, g.target), bit(col, g.target));
      else if (row == col) out(row, col) = 1.0;
    }
  }
  return out;
}

ComplexMatrix dense_product(const GateList& g) {
  ComplexMatrix u = ComplexMatrix::identity(std::size_t{1} << g.qubits);
  for (const auto& gate : g.gates) u = oracle::naive_matmul(dense_gate(gate, g.qubits), u);
  return u;
}

std::vector<GateKind> kinds(const std::vector<QubitGate>& gates) {
  std::vector<GateKind> out;
  for (const auto& g : gates) out.push_back(g.kind);
  return out;
}

}  // namespace

TEST(ModeBits, Examples) {
  EXPECT_EQ(mode_to_bits(0, 3), "000");
  EXPECT_EQ(mode_to_bits(5, 3), "101");
  EXPECT_EQ(mode_to_bits(1, 1), "1");
  EXPECT_THROW(mode_to_bits(8, 3), DomainError);
}

TEST(ModeBits, Bijective) {
  for (std::size_t p = 1; p <= 6; ++p) {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < (std::size_t{1} << p); ++k) {
      const auto s = mode_to_bits(k, p);
      EXPECT_EQ(std::stoul(s, nullptr, 2), k);
      seen.insert(s);
    }
    EXPECT_EQ(seen.size(), std::size_t{1} << p);
  }
}

TEST(QubitsForModes, PowersOfTwoOnly) {
  EXPECT_EQ(qubits_for_modes(2), 1u);
  EXPECT_EQ(qubits_for_modes(16), 4u);
  for (std::size_t m : {0u, 1u, 3u, 6u, 12u}) EXPECT_THROW(qubits_for_modes(m), DomainError) << m;
}

TEST(GateMatrices, DenseOracleAgreesWithApplyGate) {
  RngStream rng(1, {});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + trial % 4;
    QubitGate g;
    g.kind = static_cast<GateKind>(trial % 4);
    g.target = rng.next_u64() % p;
    if (g.kind == GateKind::PHI || g.kind == GateKind::PHIBAR) g.phi = kTwoPi * rng.uniform_open();
    for (std::size_t q = 0; q < p; ++q)
      if (q != g.target && rng.uniform_open() < 0.5) g.controls.push_back({q, int(rng.next_u64() % 2)});
    const GateList list{p, {g}};
    EXPECT_LT(max_abs_diff(gates_to_unitary(list), dense_gate(g, p)), 1e-15);
  }
}

TEST(GateMatrices, SingleGateExamples) {
  const GateList cx{2, {{GateKind::X, 1, {{0, 1}}, std::nullopt}}};
  const ComplexMatrix expect{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
  EXPECT_EQ(gates_to_unitary(cx), expect);
  const GateList phibar{1, {{GateKind::PHIBAR, 0, {}, 0.3}}};
  EXPECT_LT(max_abs_diff(gates_to_unitary(phibar),
                         ComplexMatrix{{std::polar(1.0, -0.3), 0.0}, {0.0, std::polar(1.0, 0.3)}}),
            1e-16);
}

TEST(GlobalPhase, Comparison) {
  const ComplexMatrix a{{1.0, 0.5}, {0.0, 2.0}};
  auto scaled = [&](Complex c) {
    ComplexMatrix out = a;
    for (Complex& z : out.entries()) z *= c;
    return out;
  };
  EXPECT_TRUE(equal_up_to_global_phase(scaled(std::polar(1.0, 1.2)), a, 1e-14));
  EXPECT_FALSE(equal_up_to_global_phase(scaled(1.1), a, 1e-3));
  ComplexMatrix b = a;
  b(0, 0) *= -1.0;
  EXPECT_FALSE(equal_up_to_global_phase(b, a, 1e-3));
  EXPECT_THROW(equal_up_to_global_phase(a, ComplexMatrix::identity(3), 1e-3), ShapeError);
}

TEST(Routing, AlreadyAdjacentPairNeedsNoGates) {
  EXPECT_TRUE(route_pair(2, 3, 2).empty());
  EXPECT_TRUE(route_pair(4, 5, 3).empty());
}

TEST(Routing, MapsPairOntoFinalQubit) {
  for (std::size_t p = 1; p <= 4; ++p) {
    const std::size_t dim = std::size_t{1} << p;
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a + 1; b < dim; ++b) {
        const GateList g{p, route_pair(a, b, p)};
        const auto u = dense_product(g);
        const std::size_t c = a / 2;
        EXPECT_EQ(u(2 * c, a), Complex(1.0)) << a << " " << b;
        EXPECT_EQ(u(2 * c + 1, b), Complex(1.0)) << a << " " << b;
        for (const auto& gate : g.gates) EXPECT_EQ(gate.controls.size(), p - 1);
      }
    }
  }
}

TEST(Compile, SingleQubitComponent) {
  const double theta = 1.1, phi = 2.3;
  const auto gates = compile_component(0, 1, theta, phi, 1);
  EXPECT_EQ(kinds(gates), (std::vector<GateKind>{GateKind::H, GateKind::PHI, GateKind::H, GateKind::PHI}));
  const auto want =
      oracle::naive_matmul(oracle::phase_on(0, phi, 2), oracle::coupler(theta, Convention::mzi_beamsplitter));
  EXPECT_TRUE(equal_up_to_global_phase(gates_to_unitary({1, gates}), want, 1e-12));
}

TEST(Compile, DistantPairOnThreeQubits) {
  for (Convention conv : {Convention::mzi_beamsplitter, Convention::mzi_directional_coupler}) {
    for (bool phase_first : {false, true}) {
      for (std::size_t pm : {3u, 4u}) {
        const double theta = 0.7, phi = 4.0;
        const auto gates = compile_component(3, 4, theta, phi, 3, conv, pm, phase_first);
        const auto c = oracle::embed(oracle::coupler(theta, conv), 3, 4, 8);
        const auto ph = oracle::phase_on(pm, phi, 8);
        const auto want = phase_first ? oracle::naive_matmul(c, ph) : oracle::naive_matmul(ph, c);
        EXPECT_TRUE(equal_up_to_global_phase(dense_product({3, gates}), want, 1e-12));
      }
    }
  }
}

TEST(Compile, SingleModePhase) {
  for (std::size_t mode = 0; mode < 8; ++mode) {
    std::vector<QubitGate> gates;
    compile_mode_phase(mode, 1.7, 3, gates);
    EXPECT_TRUE(equal_up_to_global_phase(dense_product({3, gates}), oracle::phase_on(mode, 1.7, 8), 1e-12));
  }
}

TEST(Compile, RoundTripMatchesCircuitUnitary) {
  for (std::size_t p = 1; p <= 3; ++p) {
    for (Scheme s : kAllSchemes) {
      for (Convention conv : {Convention::mzi_beamsplitter, Convention::mzi_directional_coupler}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
          const auto c = sample_circuit(std::size_t{1} << p, s, conv, seed);
          const auto g = compile_circuit(c);
          validate(g);
          ASSERT_TRUE(equal_up_to_global_phase(gates_to_unitary(g), build_unitary(c), 1e-10))
              << to_string(s) << " " << to_string(conv) << " p=" << p << " seed=" << seed;
        }
      }
    }
  }
}

TEST(Compile, RoundTripFourQubits) {
  for (Scheme s : kAllSchemes) {
    const auto c = sample_circuit(16, s, Convention::mzi_directional_coupler, 3);
    EXPECT_TRUE(equal_up_to_global_phase(dense_product(compile_circuit(c)), oracle::mesh_unitary(c), 1e-10));
  }
}

TEST(Compile, RejectsUnsupportedCircuits) {
  EXPECT_THROW(compile_circuit(sample_circuit(6, Scheme::rectangular, Convention::mzi_beamsplitter, 1)),
               DomainError);
  EXPECT_THROW(compile_circuit(sample_circuit(1, Scheme::triangular_adjacent, Convention::mzi_beamsplitter, 1)),
               DomainError);
  EXPECT_THROW(compile_circuit(sample_circuit(4, Scheme::triangular_adjacent, Convention::reflectivity, 1)),
               DomainError);
  EXPECT_THROW(compile_component(1, 1, 0.5, 0.0, 2), DomainError);
  EXPECT_THROW(compile_component(0, 1, 4.0, 0.0, 1), DomainError);
}

TEST(GateListValidation, RejectsMalformedGates) {
  EXPECT_THROW(validate(GateList{2, {{GateKind::H, 2, {}, std::nullopt}}}), ValidationError);
  EXPECT_THROW(validate(GateList{2, {{GateKind::PHI, 0, {}, std::nullopt}}}), ValidationError);
  EXPECT_THROW(validate(GateList{2, {{GateKind::X, 0, {}, 0.3}}}), ValidationError);
  EXPECT_THROW(validate(GateList{2, {{GateKind::X, 0, {{0, 1}}, std::nullopt}}}), ValidationError);
  EXPECT_THROW(validate(GateList{3, {{GateKind::X, 0, {{1, 1}, {1, 0}}, std::nullopt}}}), ValidationError);
  EXPECT_THROW(validate(GateList{2, {{GateKind::X, 0, {{1, 2}}, std::nullopt}}}), ValidationError);
  EXPECT_NO_THROW(validate(GateList{2, {{GateKind::X, 0, {{1, 0}}, std::nullopt}}}));
}

TEST(QubitEnsemble, MatchesModeUnitariesUpToPhase) {
  const auto e = qubit_ensemble(4, Scheme::rectangular, Convention::mzi_directional_coupler, 20, 5);
  for (std::size_t k = 0; k < e.size(); ++k) {
    const auto c = sample_circuit(4, Scheme::rectangular, Convention::mzi_directional_coupler, 5 + k);
    EXPECT_TRUE(equal_up_to_global_phase(e[k], build_unitary(c), 1e-10));
  }
}

TEST(QubitEnsemble, IndistinguishableFromOracle) {
  const auto gates = qubit_ensemble(4, Scheme::triangular_original, Convention::mzi_beamsplitter, 10000, 17);
  const auto oracle = oracle_ensemble(4, 10000, 18);
  for (const auto& r : two_sample_battery("gates", gates, "oracle", oracle)) EXPECT_TRUE(r.pass) << r.name;
}

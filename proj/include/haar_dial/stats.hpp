#pragma once

// Statistical certification of dialled ensembles.
//
// The reference is the Ginibre-QR sampler: QR-decompose a matrix of iid
// complex normals and rotate the columns of Q by the phases of diag(R),
// which makes the factorization unique and Q exactly Haar. Dialled
// ensembles are compared with it and with each other by Kolmogorov-Smirnov
// tests at alpha = 0.01, and with known Haar moments
// (E|U_ij|^2 = 1/m, E|Tr U|^2 = 1) at five standard errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "haar_dial/circuit.hpp"
#include "haar_dial/errors.hpp"
#include "haar_dial/linalg.hpp"
#include "haar_dial/parallel.hpp"
#include "haar_dial/qubit.hpp"
#include "haar_dial/rng.hpp"
#include "haar_dial/sampler.hpp"

namespace haar_dial {

// --- Kolmogorov-Smirnov ---------------------------------------------------

inline constexpr double kKsCoefficient = 1.63;  // alpha = 0.01
inline constexpr double kMomentSigmas = 5.0;

inline double ks_critical_one(std::size_t n) { return kKsCoefficient / std::sqrt(static_cast<double>(n)); }

inline double ks_critical_two(std::size_t n1, std::size_t n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return kKsCoefficient * std::sqrt((a + b) / (a * b));
}

/// sup_x |F_N(x) - cdf(x)|
inline double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_one_sample: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, (static_cast<double>(k) + 1.0) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

/// sup_x |F_A(x) - F_B(x)|, evaluated after each run of tied values.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: no samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] == x) ++ia;
    while (ib < b.size() && b[ib] == x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return d;
}

// --- reports --------------------------------------------------------------

struct TestRecord {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

inline TestRecord make_record(std::string name, double statistic, double threshold) {
  const bool pass = std::isfinite(statistic) && statistic <= threshold;
  return {std::move(name), statistic, threshold, pass};
}

struct EnsembleReport {
  std::size_t m = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::vector<TestRecord> records;
  // empirical E|U_ij|^2 per ensemble name
  std::map<std::string, std::vector<std::vector<double>>> entry_moment_tables;

  bool all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const TestRecord& r) { return r.pass; });
  }
};

inline TestRecord ks_one_record(std::string name, std::vector<double> samples,
                                const std::function<double(double)>& cdf) {
  const std::size_t n = samples.size();
  return make_record(std::move(name), ks_one_sample(std::move(samples), cdf), ks_critical_one(n));
}

inline TestRecord ks_two_record(std::string name, std::vector<double> a, std::vector<double> b) {
  const std::size_t na = a.size(), nb = b.size();
  return make_record(std::move(name), ks_two_sample(std::move(a), std::move(b)), ks_critical_two(na, nb));
}

// --- ensembles ------------------------------------------------------------

using Ensemble = std::vector<ComplexMatrix>;

inline ComplexMatrix haar_oracle_sample(std::size_t m, RngStream& rng) {
  if (m < 1) throw DomainError("haar_oracle_sample: need m >= 1");
  ComplexMatrix z(m, m);
  for (Complex& v : z.entries()) v = rng.complex_normal();
  auto [q, r] = householder_qr(z);
  for (std::size_t j = 0; j < m; ++j) {
    const Complex phase = r(j, j) / std::abs(r(j, j));
    for (std::size_t i = 0; i < m; ++i) q(i, j) *= phase;
  }
  return q;
}

inline Ensemble oracle_ensemble(std::size_t m, std::size_t count, std::uint64_t seed, unsigned threads = 1) {
  Ensemble out(count);
  parallel_for(count, threads, [&](std::size_t k) {
    RngStream rng(seed, {static_cast<std::uint64_t>(k), 0, StreamKind::oracle});
    out[k] = haar_oracle_sample(m, rng);
  });
  return out;
}

/// Circuit k of a dialled ensemble uses seed + k. With zero_phases set every
/// phase shifter is forced to 0, a deliberately non-Haar generator used as a
/// negative control.
inline Ensemble dial_ensemble(std::size_t m, Scheme scheme, Convention convention, std::size_t count,
                              std::uint64_t seed, unsigned threads = 1, bool zero_phases = false) {
  Ensemble out(count);
  parallel_for(count, threads, [&](std::size_t k) {
    CircuitSpec c = sample_circuit(m, scheme, convention, seed + k);
    if (zero_phases) {
      for (auto& p : c.components) p.phase_phi = 0.0;
      for (double& phi : c.terminal_phases) phi = 0.0;
    }
    out[k] = build_unitary(c);
  });
  return out;
}

/// Unitaries of compiled qubit gate lists for 2^p-mode MZI circuits. The
/// gate set fixes det U = +-1, so the compiler is exact only up to a global
/// phase; each unitary is multiplied by an independent uniform phase, which
/// leaves a Haar ensemble Haar and makes the comparison phase-blind.
inline Ensemble qubit_ensemble(std::size_t m, Scheme scheme, Convention convention, std::size_t count,
                               std::uint64_t seed, unsigned threads = 1) {
  Ensemble out(count);
  parallel_for(count, threads, [&](std::size_t k) {
    ComplexMatrix u = gates_to_unitary(compile_circuit(sample_circuit(m, scheme, convention, seed + k)));
    RngStream rng(seed, {k, 0, StreamKind::generic});
    const Complex phase = std::polar(1.0, sample_phase(rng));
    for (Complex& z : u.entries()) z *= phase;
    out[k] = std::move(u);
  });
  return out;
}

// --- statistics on ensembles ----------------------------------------------

/// CDF of |U_ij|^2 for Haar U(m).
inline double haar_entry_cdf(std::size_t m, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - x, static_cast<double>(m) - 1.0);
}

inline void check_ensemble(const Ensemble& e, std::size_t m) {
  if (e.empty()) throw DomainError("empty ensemble");
  for (const auto& u : e)
    if (u.rows() != m || u.cols() != m) throw ShapeError("ensemble member has the wrong size");
}

/// One |U_ij|^2 per matrix, cycling (i, j) through all m^2 entries. Every
/// entry has the same Haar law, and taking one per matrix keeps the pooled
/// sample independent, which the KS critical values assume.
inline std::vector<double> pooled_entry_samples(const Ensemble& e) {
  std::vector<double> out(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    const std::size_t m = e[k].rows();
    const std::size_t idx = k % (m * m);
    out[k] = std::norm(e[k](idx / m, idx % m));
  }
  return out;
}

inline std::vector<double> entry_samples(const Ensemble& e, std::size_t i, std::size_t j,
                                         double (*part)(const Complex&)) {
  std::vector<double> out(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) out[k] = part(e[k](i, j));
  return out;
}

inline double real_part(const Complex& z) { return z.real(); }
inline double imag_part(const Complex& z) { return z.imag(); }

inline std::vector<TestRecord> entry_density_test(const Ensemble& e, std::size_t m, const std::string& name) {
  check_ensemble(e, m);
  return {ks_one_record(name + ": |U_ij|^2 vs Haar marginal", pooled_entry_samples(e),
                        [m](double x) { return haar_entry_cdf(m, x); })};
}

/// E|U_ij|^2 = 1/m at every entry; the statistic is the largest z-score.
inline TestRecord entry_moment_test(const Ensemble& e, std::size_t m, const std::string& name,
                                    std::vector<std::vector<double>>* table = nullptr) {
  check_ensemble(e, m);
  const double n = static_cast<double>(e.size());
  double worst = 0.0;
  std::vector<std::vector<double>> means(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double sum = 0.0, sum_sq = 0.0;
      for (const auto& u : e) {
        const double x = std::norm(u(i, j));
        sum += x;
        sum_sq += x * x;
      }
      const double mean = sum / n;
      const double var = std::max(0.0, sum_sq / n - mean * mean) * n / std::max(1.0, n - 1.0);
      const double se = std::sqrt(var / n);
      const double dev = std::abs(mean - 1.0 / static_cast<double>(m));
      worst = std::max(worst, se > 0.0 ? dev / se : (dev > 0.0 ? INFINITY : 0.0));
      means[i][j] = mean;
    }
  }
  if (table) *table = std::move(means);
  return make_record(name + ": E|U_ij|^2 = 1/m (max z-score)", worst, kMomentSigmas);
}

struct MomentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

inline MomentEstimate trace_moment(const Ensemble& e) {
  if (e.empty()) throw DomainError("trace_moment: empty ensemble");
  const double n = static_cast<double>(e.size());
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& u : e) {
    Complex tr{};
    for (std::size_t i = 0; i < u.rows(); ++i) tr += u(i, i);
    const double x = std::norm(tr);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean) * n / std::max(1.0, n - 1.0);
  return {mean, std::sqrt(var / n)};
}

/// Pass iff |E|Tr U|^2 - 1| <= 5 SE. A constant ensemble has SE = 0 and
/// passes only if its value is exactly 1.
inline TestRecord trace_moment_test(const Ensemble& e, const std::string& name) {
  const MomentEstimate est = trace_moment(e);
  return make_record(name + ": E|Tr U|^2 = 1", std::abs(est.mean - 1.0), kMomentSigmas * est.standard_error);
}

/// Two-sample KS on pooled |U_ij|^2, Re U_00 and Im U_01.
inline std::vector<TestRecord> two_sample_battery(const std::string& name_a, const Ensemble& a,
                                                  const std::string& name_b, const Ensemble& b) {
  const std::string tag = name_a + " vs " + name_b;
  std::vector<TestRecord> out;
  out.push_back(ks_two_record(tag + ": |U_ij|^2", pooled_entry_samples(a), pooled_entry_samples(b)));
  out.push_back(ks_two_record(tag + ": Re U_00", entry_samples(a, 0, 0, real_part),
                              entry_samples(b, 0, 0, real_part)));
  if (a.front().cols() > 1 && b.front().cols() > 1)
    out.push_back(ks_two_record(tag + ": Im U_01", entry_samples(a, 0, 1, imag_part),
                                entry_samples(b, 0, 1, imag_part)));
  return out;
}

inline Ensemble left_multiply(const ComplexMatrix& v, const Ensemble& e) {
  Ensemble out;
  out.reserve(e.size());
  for (const auto& u : e) out.push_back(v * u);
  return out;
}

// --- the full battery -----------------------------------------------------

struct VerifyConfig {
  std::size_t m = 4;
  std::size_t samples = 20000;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  Convention convention = Convention::reflectivity;
  std::uint64_t seed = 7;
  unsigned threads = 1;
  bool zero_phases = false;  // negative-control hook
};

// Seed labels keep every ensemble in the battery independent of the others.
inline constexpr std::uint64_t kOracleLabel = 0x100;
inline constexpr std::uint64_t kDialLabel = 0x200;
inline constexpr std::uint64_t kPartnerLabel = 0x300;
inline constexpr std::uint64_t kLeftFactorLabel = 0x400;

/// Per ensemble: one-sample entry KS, entry moments, trace moment. Then
/// pairwise two-sample tests among all ensembles, and left invariance of
/// each dialled ensemble (V U against an independent dialled ensemble).
inline EnsembleReport run_verify(const VerifyConfig& cfg) {
  if (cfg.m < 2) throw ValidationError("verify needs m >= 2");
  if (cfg.samples < 10) throw ValidationError("verify needs at least 10 samples");
  if (cfg.schemes.empty()) throw ValidationError("verify needs at least one scheme");

  EnsembleReport report;
  report.m = cfg.m;
  report.sample_count = cfg.samples;
  report.seed = cfg.seed;

  std::vector<std::string> names{"oracle"};
  std::vector<Ensemble> ensembles;
  ensembles.push_back(oracle_ensemble(cfg.m, cfg.samples, derive_seed(cfg.seed, kOracleLabel), cfg.threads));
  for (Scheme s : cfg.schemes) {
    names.emplace_back(to_string(s));
    ensembles.push_back(dial_ensemble(cfg.m, s, cfg.convention, cfg.samples,
                                      derive_seed(cfg.seed, kDialLabel + static_cast<std::uint64_t>(s)),
                                      cfg.threads, cfg.zero_phases));
  }

  for (std::size_t k = 0; k < ensembles.size(); ++k) {
    auto density = entry_density_test(ensembles[k], cfg.m, names[k]);
    report.records.insert(report.records.end(), density.begin(), density.end());
    report.records.push_back(
        entry_moment_test(ensembles[k], cfg.m, names[k], &report.entry_moment_tables[names[k]]));
    report.records.push_back(trace_moment_test(ensembles[k], names[k]));
  }
  for (std::size_t a = 0; a < ensembles.size(); ++a)
    for (std::size_t b = a + 1; b < ensembles.size(); ++b) {
      auto rows = two_sample_battery(names[a], ensembles[a], names[b], ensembles[b]);
      report.records.insert(report.records.end(), rows.begin(), rows.end());
    }

  RngStream v_rng(derive_seed(cfg.seed, kLeftFactorLabel), {0, 0, StreamKind::oracle});
  const ComplexMatrix v = haar_oracle_sample(cfg.m, v_rng);
  for (std::size_t k = 0; k < cfg.schemes.size(); ++k) {
    const Scheme s = cfg.schemes[k];
    const Ensemble partner =
        dial_ensemble(cfg.m, s, cfg.convention, cfg.samples,
                      derive_seed(cfg.seed, kPartnerLabel + static_cast<std::uint64_t>(s)), cfg.threads,
                      cfg.zero_phases);
    const Ensemble rotated = left_multiply(v, ensembles[k + 1]);
    const std::string tag = "left invariance " + names[k + 1];
    report.records.push_back(
        ks_two_record(tag + ": |(VU)_ij|^2", pooled_entry_samples(rotated), pooled_entry_samples(partner)));
    report.records.push_back(ks_two_record(tag + ": Re (VU)_00", entry_samples(rotated, 0, 0, real_part),
                                           entry_samples(partner, 0, 0, real_part)));
  }
  return report;
}

}  // namespace haar_dial

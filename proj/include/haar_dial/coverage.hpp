#pragma once

// Fraction of the unitary group still reachable when every reflectivity is
// confined to [|eps|, 1 - |eps|]. Each coupler contributes the probability
// mass its marginal keeps on that interval; the fractions multiply.
//
// Error draws use common random numbers: trial t gives coupler (n, i) the
// error eps = sigma * z with z fixed by (seed, t, n, i). Per trial the
// coverage is then monotone in both m and sigma, not just on average.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "haar_dial/circuit.hpp"
#include "haar_dial/errors.hpp"
#include "haar_dial/parallel.hpp"
#include "haar_dial/rng.hpp"

namespace haar_dial {

enum class ErrorMode { per_component, shared };

inline std::string_view to_string(ErrorMode mode) {
  return mode == ErrorMode::per_component ? "per-component" : "shared";
}

inline ErrorMode parse_error_mode(std::string_view text) {
  if (text == "per-component") return ErrorMode::per_component;
  if (text == "shared") return ErrorMode::shared;
  throw ValidationError("unknown error mode '" + std::string(text) + "'");
}

/// (1-|eps|)^e - |eps|^e, the mass of e(1-r)^(e-1) on [|eps|, 1-|eps|].
inline double truncated_mass(int e, double eps) {
  if (e < 1) throw DomainError("truncated_mass: order must be >= 1");
  const double a = std::abs(eps);
  if (a >= 0.5) return 0.0;
  return std::pow(1.0 - a, e) - std::pow(a, e);
}

inline double truncated_mass(int n, int i, double eps) {
  if (i < 1 || i >= n) throw DomainError("truncated_mass: need 1 <= i < n");
  return truncated_mass(n - i, eps);
}

/// log truncated_mass without cancellation for small |eps|.
inline double log_truncated_mass(int e, double eps) {
  const double a = std::abs(eps);
  if (a >= 0.5) return -INFINITY;
  if (a == 0.0) return 0.0;
  return e * std::log1p(-a) + std::log1p(-std::pow(a / (1.0 - a), e));
}

/// log of block n's factor. Couplers are keyed by the triangular index they
/// follow (s(i) for the rectangular scheme), and the per-coupler logs are
/// summed in sorted order, so relabelling couplers cannot change the bits.
template <class EpsFn>
double block_log_coverage(int n, int m, Scheme scheme, EpsFn eps_for_label) {
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) {
    const int e = marginal_order(scheme, n, i, m);
    logs.push_back(log_truncated_mass(e, eps_for_label(n, n - e)));
  }
  std::sort(logs.begin(), logs.end());
  double sum = 0.0;
  for (double v : logs) sum += v;
  return sum;
}

struct CoverageConfig {
  std::size_t m_max = 100;
  std::vector<double> sigmas{1e-4, 5e-4, 10e-4, 20e-4};
  std::size_t trials = 1000;
  ErrorMode mode = ErrorMode::per_component;
  Scheme scheme = Scheme::triangular_adjacent;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct CoveragePoint {
  std::size_t m = 0;
  double sigma = 0.0;
  double coverage = 0.0;
  double standard_error = 0.0;
};

inline double error_normal(std::uint64_t seed, std::size_t trial, int n, int label) {
  RngStream rng(derive_seed(seed, trial),
                {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(label), StreamKind::coverage});
  return rng.normal();
}

/// Per-trial coverage for m = 2..m_max at one sigma, indexed [m - 2].
inline std::vector<double> coverage_trial(std::size_t m_max, double sigma, std::size_t trial, ErrorMode mode,
                                          Scheme scheme, std::uint64_t seed) {
  std::vector<double> out;
  double log_total = 0.0;
  const double shared = mode == ErrorMode::shared ? sigma * error_normal(seed, trial, 0, 0) : 0.0;
  auto eps = [&](int n, int label) {
    return mode == ErrorMode::shared ? shared : sigma * error_normal(seed, trial, n, label);
  };
  // Rectangular labels depend on m, so the running sum is only reusable
  // across m for the triangular schemes.
  for (std::size_t m = 2; m <= m_max; ++m) {
    const int mi = static_cast<int>(m);
    if (scheme == Scheme::rectangular) {
      log_total = 0.0;
      for (int n = 2; n <= mi; ++n) log_total += block_log_coverage(n, mi, scheme, eps);
    } else {
      log_total += block_log_coverage(mi, mi, scheme, eps);
    }
    out.push_back(std::exp(log_total));
  }
  return out;
}

/// Mean coverage with its Monte-Carlo standard error, for every (m, sigma).
inline std::vector<CoveragePoint> coverage_curves(const CoverageConfig& cfg) {
  if (cfg.m_max < 2) throw ValidationError("coverage needs m_max >= 2");
  if (cfg.trials < 1) throw ValidationError("coverage needs at least one trial");
  for (double s : cfg.sigmas)
    if (!(s >= 0.0 && s < 0.5)) throw ValidationError("sigma must lie in [0, 0.5)");

  std::vector<CoveragePoint> out;
  const std::size_t curve_len = cfg.m_max - 1;
  for (double sigma : cfg.sigmas) {
    std::vector<std::vector<double>> per_trial(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      per_trial[t] = coverage_trial(cfg.m_max, sigma, t, cfg.mode, cfg.scheme, cfg.seed);
    });
    for (std::size_t k = 0; k < curve_len; ++k) {
      double sum = 0.0, sum_sq = 0.0;
      for (const auto& tr : per_trial) {
        sum += tr[k];
        sum_sq += tr[k] * tr[k];
      }
      const double n = static_cast<double>(cfg.trials);
      const double mean = sum / n;
      const double var = cfg.trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
      out.push_back({k + 2, sigma, mean, std::sqrt(var / n)});
    }
  }
  return out;
}

/// Single-m convenience wrapper.
inline CoveragePoint coverage(std::size_t m, double sigma, std::size_t trials, ErrorMode mode,
                              std::uint64_t seed) {
  CoverageConfig cfg;
  cfg.m_max = m;
  cfg.sigmas = {sigma};
  cfg.trials = trials;
  cfg.mode = mode;
  cfg.seed = seed;
  return coverage_curves(cfg).back();
}

}  // namespace haar_dial

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "haar_dial/coverage.hpp"
#include "haar_dial/io.hpp"
#include "haar_dial/jacobian.hpp"
#include "haar_dial/normalization.hpp"
#include "haar_dial/qubit.hpp"
#include "haar_dial/sampler.hpp"
#include "haar_dial/stats.hpp"

using namespace haar_dial;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v, "%.3g"); }

Outcome with_time_limit(Outcome o, Clock::time_point t0, double limit) {
  const double s = seconds_since(t0);
  o.detail += ", " + fmt(s) + " s (limit " + fmt(limit) + " s)";
  o.pass = o.pass && s < limit;
  return o;
}

// 1 -----------------------------------------------------------------------------
Outcome unitarity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::size_t k = 0; k < 1000; ++k) {
    const std::size_t m = 2 + k % 15;
    const Scheme s = kAllSchemes[k % 3];
    const Convention c = kAllConventions[(k / 3) % 3];
    worst = std::max(worst, unitarity_defect(build_unitary(sample_circuit(m, s, c, 1000 + k))));
  }
  return with_time_limit({worst < 1e-10, "max defect " + fmt(worst)}, t0, 60);
}

// 2 -----------------------------------------------------------------------------
Outcome marginal_samplers() {
  const auto t0 = Clock::now();
  const std::size_t n_draws = 100000;
  double worst_ratio = 0.0;
  std::string rejected;
  int rejections = 0;
  for (int e = 1; e <= 9; ++e) {
    for (Convention conv : kAllConventions) {
      RngStream rng(derive_seed(7, static_cast<std::uint64_t>(e * 8) + static_cast<std::uint64_t>(conv)), {});
      std::vector<double> draws(n_draws);
      std::function<double(double)> cdf;
      switch (conv) {
        case Convention::reflectivity:
          for (auto& v : draws) v = sample_reflectivity(e + 1, 1, rng);
          cdf = [e](double r) { return 1.0 - std::pow(1.0 - r, e); };
          break;
        case Convention::mzi_beamsplitter:
          for (auto& v : draws) v = sample_theta(e + 1, 1, conv, rng);
          cdf = [e](double t) { return std::pow(std::sin(t / 2), 2 * e); };
          break;
        case Convention::mzi_directional_coupler:
          for (auto& v : draws) v = sample_theta(e + 1, 1, conv, rng);
          cdf = [e](double t) { return 1.0 - std::pow(std::cos(t / 2), 2 * e); };
          break;
      }
      const double d = ks_one_sample(draws, cdf);
      const double crit = ks_critical_one(n_draws);
      worst_ratio = std::max(worst_ratio, d / crit);
      if (d >= crit) {
        ++rejections;
        rejected += " [" + std::string(to_string(conv)) + " n-i=" + std::to_string(e) + " D/critical " +
                    fmt(d / crit) + "]";
      }
    }
  }
  // each test has size 0.01, so even an exact sampler clears all 27 with
  // probability 0.99^27 = 0.76
  return with_time_limit({rejections == 0, std::to_string(rejections) +
                                               "/27 KS tests reject (0.27 expected by chance), max D/critical " +
                                               fmt(worst_ratio) + rejected},
                         t0, 30);
}

// 3 -----------------------------------------------------------------------------
Outcome jacobian() {
  const auto t0 = Clock::now();
  const auto rep = run_jacobian_check(8, 100, 1);
  double rel = 0.0, closed = 0.0, final_err = 0.0;
  std::size_t failures = 0;
  for (const auto& d : rep.dimensions) {
    rel = std::max(rel, d.max_relative_error);
    closed = std::max(closed, d.max_closed_form_error);
    final_err = std::max(final_err, d.max_final_element_error);
    failures += d.reduction_failures;
  }
  const bool ok = rep.all_pass() && rep.dimensions.size() == 7 && closed < 1e-10 && final_err < 1e-10;
  return with_time_limit({ok, "max rel err " + fmt(rel) + ", reduction err " + fmt(closed) + ", final element err " +
                                  fmt(final_err) + ", " + std::to_string(failures) + " reduction failures"},
                         t0, 30);
}

// 4 and 5 share one battery run ------------------------------------------------
struct BatterySplit {
  Outcome haar, left;
};

BatterySplit battery() {
  const auto t0 = Clock::now();
  VerifyConfig cfg;  // m = 4, N = 20000, seed 7
  const auto rep = run_verify(cfg);
  const double elapsed = seconds_since(t0);
  std::size_t haar_n = 0, haar_fail = 0, left_n = 0, left_fail = 0;
  std::string failed;
  for (const auto& r : rep.records) {
    const bool is_left = r.name.rfind("left invariance", 0) == 0;
    (is_left ? left_n : haar_n)++;
    if (!r.pass) {
      (is_left ? left_fail : haar_fail)++;
      failed += " [" + r.name + "]";
    }
  }
  BatterySplit out;
  out.haar = {haar_fail == 0 && haar_n == 30 && elapsed < 300,
              std::to_string(haar_n - haar_fail) + "/" + std::to_string(haar_n) + " records pass, " + fmt(elapsed) +
                  " s (limit 300 s)" + failed};
  out.left = {left_fail == 0 && left_n == 6,
              std::to_string(left_n - left_fail) + "/" + std::to_string(left_n) + " records pass"};
  return out;
}

// 6 -----------------------------------------------------------------------------
Outcome normalization() {
  double marginal = 0.0, unit = 0.0;
  bool ok = true;
  const auto records = pdf_normalization_check(20);
  for (const auto& r : records) {
    ok = ok && r.pass;
    double& slot = r.name.rfind("unit-vector", 0) == 0 ? unit : marginal;
    slot = std::max(slot, r.statistic);
  }
  ok = ok && marginal < 1e-9 && unit < 1e-7 && records.size() == 19 * 3 + 7;
  return {ok, "max marginal err " + fmt(marginal) + ", max unit-vector err " + fmt(unit)};
}

// 7 -----------------------------------------------------------------------------
Outcome coverage_shape() {
  const auto t0 = Clock::now();
  CoverageConfig cfg;  // m <= 100, sigmas {1, 5, 10, 20} x 1e-4, 1000 trials
  const auto pts = coverage_curves(cfg);
  CoverageConfig zero = cfg;
  zero.sigmas = {0.0};
  zero.trials = 10;
  bool zero_ok = true;
  for (const auto& p : coverage_curves(zero)) zero_ok = zero_ok && p.coverage == 1.0;

  const std::size_t len = cfg.m_max - 1;
  bool decreasing = true, ordered = true;
  for (std::size_t s = 0; s < cfg.sigmas.size(); ++s) {
    for (std::size_t k = 1; k < len; ++k)
      decreasing = decreasing && pts[s * len + k].coverage < pts[s * len + k - 1].coverage;
    if (s > 0)
      for (std::size_t k = 0; k < len; ++k)
        ordered = ordered && pts[s * len + k].coverage < pts[(s - 1) * len + k].coverage;
  }
  const double last = pts.back().coverage;
  return with_time_limit({zero_ok && decreasing && ordered,
                          std::string("sigma=0 ") + (zero_ok ? "all 1" : "NOT all 1") + ", strictly decreasing " +
                              (decreasing ? "yes" : "no") + ", ordered by sigma " + (ordered ? "yes" : "no") +
                              ", cov(100, 2e-3) = " + fmt(last)},
                         t0, 60);
}

// 8 -----------------------------------------------------------------------------
Outcome rectangular_sequence() {
  const bool example = clements_sequence(6, 6) == std::vector<int>{5, 3, 1, 2, 4};
  bool perms = true;
  for (int m = 2; m <= 65; ++m) {
    for (int n = 2; n <= std::min(m, 64); ++n) {
      auto s = clements_sequence(n, m);
      std::sort(s.begin(), s.end());
      std::vector<int> want(static_cast<std::size_t>(n - 1));
      std::iota(want.begin(), want.end(), 1);
      perms = perms && s == want;
    }
  }
  return {example && perms, std::string("s(6) ") + (example ? "= {5,3,1,2,4}" : "WRONG") + ", permutations " +
                                (perms ? "ok" : "broken") + " for n <= 64"};
}

// 9 -----------------------------------------------------------------------------
Outcome qubit_round_trip() {
  const auto t0 = Clock::now();
  std::size_t mismatches = 0;
  for (std::size_t p = 1; p <= 3; ++p) {
    for (std::uint64_t k = 0; k < 100; ++k) {
      const Scheme s = kAllSchemes[k % 3];
      const Convention c = k % 2 ? Convention::mzi_directional_coupler : Convention::mzi_beamsplitter;
      const auto circ = sample_circuit(std::size_t{1} << p, s, c, 9000 + k);
      if (!equal_up_to_global_phase(gates_to_unitary(compile_circuit(circ)), build_unitary(circ), 1e-10))
        ++mismatches;
    }
  }
  const std::size_t n = 10000;
  const auto gates = qubit_ensemble(4, Scheme::triangular_adjacent, Convention::mzi_beamsplitter, n, 90000);
  const auto oracle = oracle_ensemble(4, n, 91);
  std::string failed;
  for (const auto& r : two_sample_battery("gate list", gates, "oracle", oracle))
    if (!r.pass) failed += " [" + r.name + " " + fmt(r.statistic) + " > " + fmt(r.threshold) + "]";
  return with_time_limit({mismatches == 0 && failed.empty(),
                          std::to_string(mismatches) + "/300 round-trip mismatches, gate-list battery " +
                              (failed.empty() ? "passes" : "fails" + failed)},
                         t0, 120);
}

// 10 ----------------------------------------------------------------------------
int run_cli(const std::string& args) {
  const std::string cmd = std::string(HAAR_DIAL_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("haar_dial_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string d = dir.string() + "/";
  // every command, each run three times: twice single-threaded, once on 4 threads
  const std::vector<std::pair<std::string, std::string>> commands{
      {"sample", "sample -m 8 -n 50 --scheme rectangular --convention mzi-beamsplitter --seed 3 --emit-matrix"},
      {"verify", "verify -m 4 -N 2000 --seed 7 --format json"},
      {"coverage", "coverage --m-max 40 --trials 200 --seed 5"},
      {"jacobian-check", "jacobian-check --points 50 --seed 1 --format json"},
  };
  std::vector<std::string> failed;
  std::size_t total_bytes = 0;
  for (const auto& [name, args] : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path out = dir / (name + "_" + std::to_string(outputs.size()) + ".out");
      std::string extra = name == "sample" || name == "coverage" ? " --out " + out.string() : " > " + out.string();
      if (name == "verify" || name == "jacobian-check")
        extra = " --report " + out.string() + ".report" + extra;
      if (run_cli(args + " --threads " + threads + extra) > 3) failed.push_back(name + " (crashed)");
      std::string bytes = slurp(out);
      if (fs::exists(out.string() + ".report")) bytes += slurp(out.string() + ".report");
      outputs.push_back(std::move(bytes));
    }
    total_bytes += outputs[0].size();
    if (outputs[0].empty() || outputs[0] != outputs[1] || outputs[0] != outputs[2]) failed.push_back(name);
  }
  // compile-qubits takes the sampled circuits as input and has no thread option
  run_cli("sample -m 8 -n 20 --convention mzi-directional-coupler --seed 4 --emit-matrix --out " + d + "c.jsonl");
  run_cli("compile-qubits --check --in " + d + "c.jsonl --out " + d + "g1.jsonl");
  run_cli("compile-qubits --check --in " + d + "c.jsonl --out " + d + "g2.jsonl");
  const std::string g1 = slurp(d + "g1.jsonl");
  if (g1.empty() || g1 != slurp(d + "g2.jsonl")) failed.push_back("compile-qubits");
  total_bytes += g1.size();
  fs::remove_all(dir);

  std::string detail = "5 commands, " + std::to_string(total_bytes) + " bytes compared";
  for (const auto& f : failed) detail += ", differs: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  BatterySplit split;
  bool battery_done = false;
  auto ensure_battery = [&] {
    if (!battery_done) split = battery();
    battery_done = true;
  };
  criteria.emplace_back("unitarity", unitarity);
  criteria.emplace_back("marginal samplers", marginal_samplers);
  criteria.emplace_back("jacobian identity", jacobian);
  criteria.emplace_back("haar certification", [&] {
    ensure_battery();
    return split.haar;
  });
  criteria.emplace_back("left invariance", [&] {
    ensure_battery();
    return split.left;
  });
  criteria.emplace_back("pdf normalization", normalization);
  criteria.emplace_back("coverage shape", coverage_shape);
  criteria.emplace_back("rectangular sequence", rectangular_sequence);
  criteria.emplace_back("qubit round trip", qubit_round_trip);
  criteria.emplace_back("determinism", determinism);

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1) << ". " << criteria[k].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}

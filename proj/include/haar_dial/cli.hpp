#pragma once

// Command-line front end. Every command is a function returning an exit code:
// 0 success, 1 I/O failure, 2 usage or validation error, 3 a verification
// that ran but did not pass.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haar_dial/circuit.hpp"
#include "haar_dial/coverage.hpp"
#include "haar_dial/errors.hpp"
#include "haar_dial/io.hpp"
#include "haar_dial/jacobian.hpp"
#include "haar_dial/parallel.hpp"
#include "haar_dial/qubit.hpp"
#include "haar_dial/sampler.hpp"
#include "haar_dial/stats.hpp"

namespace haar_dial::cli {

enum ExitCode : int { kOk = 0, kIoFailure = 1, kUsage = 2, kVerificationFailed = 3 };

inline constexpr const char* kSeedVariable = "HAAR_DIAL_SEED";
inline constexpr double kRoundTripTolerance = 1e-10;

/// Flag, then HAAR_DIAL_SEED, then a fresh random seed.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedVariable); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 10);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ValidationError(std::string(kSeedVariable) + " is not an unsigned integer: '" + env + "'");
    }
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

/// Path "-" means the given stream.
inline void write_output(const std::string& path, const std::string& content, std::ostream& std_out) {
  if (path == "-") {
    std_out << content;
    std_out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(f), {}};
}

/// A file holding either one JSON document or JSON-lines.
inline std::vector<Json> parse_json_documents(const std::string& text) {
  std::vector<Json> docs;
  try {
    docs.push_back(Json::parse(text));
    return docs;
  } catch (const Json::parse_error&) {
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw ValidationError(std::string("input is not JSON or JSON-lines: ") + e.what());
    }
  }
  return docs;
}

// --- sample --------------------------------------------------------------------

struct SampleConfig {
  std::size_t modes = 4;
  Scheme scheme = Scheme::triangular_adjacent;
  Convention convention = Convention::reflectivity;
  std::optional<std::uint64_t> seed;
  std::size_t count = 1;
  std::string out = "-";
  bool emit_matrix = false;
  std::string matrix_out;  // empty: matrix lines follow their circuit in `out`
  unsigned threads = 1;
};

/// Circuit k of the batch is sampled with seed + k.
inline int cmd_sample(const SampleConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.modes < 1) {
    err << "sample: --modes must be >= 1\n";
    return kUsage;
  }
  if (cfg.count < 1) {
    err << "sample: --count must be >= 1\n";
    return kUsage;
  }
  const std::uint64_t seed = resolve_seed(cfg.seed);
  std::vector<std::string> circuit_lines(cfg.count), matrix_lines(cfg.emit_matrix ? cfg.count : 0);
  parallel_for(cfg.count, cfg.threads, [&](std::size_t k) {
    const CircuitSpec c = sample_circuit(cfg.modes, cfg.scheme, cfg.convention, seed + k);
    circuit_lines[k] = circuit_to_json(c).dump() + "\n";
    if (cfg.emit_matrix) matrix_lines[k] = matrix_to_json(build_unitary(c)).dump() + "\n";
  });
  std::string main_text, matrix_text;
  for (std::size_t k = 0; k < cfg.count; ++k) {
    main_text += circuit_lines[k];
    if (!cfg.emit_matrix) continue;
    (cfg.matrix_out.empty() ? main_text : matrix_text) += matrix_lines[k];
  }
  write_output(cfg.out, main_text, out);
  if (cfg.emit_matrix && !cfg.matrix_out.empty()) write_output(cfg.matrix_out, matrix_text, out);
  return kOk;
}

// --- verify --------------------------------------------------------------------

inline constexpr std::size_t kMinVerifySamples = 1000;

struct VerifyCommand {
  std::size_t modes = 4;
  std::size_t samples = 20000;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  Convention convention = Convention::reflectivity;
  std::optional<std::uint64_t> seed;
  std::string report_path;
  bool json_stdout = false;
  unsigned threads = 1;
  bool inject_bias = false;
};

inline int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err) {
  if (cmd.samples < kMinVerifySamples) {
    err << "verify: --samples must be >= " << kMinVerifySamples << "\n";
    return kUsage;
  }
  if (cmd.modes < 2) {
    err << "verify: --modes must be >= 2\n";
    return kUsage;
  }
  VerifyConfig cfg;
  cfg.m = cmd.modes;
  cfg.samples = cmd.samples;
  cfg.schemes = cmd.schemes;
  cfg.convention = cmd.convention;
  cfg.seed = resolve_seed(cmd.seed);
  cfg.threads = cmd.threads;
  cfg.zero_phases = cmd.inject_bias;
  const Json report = report_to_json(run_verify(cfg));
  if (!cmd.report_path.empty()) write_output(cmd.report_path, report.dump(2) + "\n", out);
  out << (cmd.json_stdout ? report.dump(2) + "\n" : report_text(report));
  return report.at("pass").get<bool>() ? kOk : kVerificationFailed;
}

// --- coverage ------------------------------------------------------------------

struct CoverageCommand {
  CoverageConfig config;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
};

inline int cmd_coverage(CoverageCommand cmd, std::ostream& out, std::ostream& err) {
  cmd.config.seed = resolve_seed(cmd.seed);
  try {
    write_output(cmd.out, coverage_csv(coverage_curves(cmd.config)), out);
  } catch (const ValidationError& e) {
    err << "coverage: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

// --- compile-qubits ------------------------------------------------------------

struct CompileCommand {
  std::string in;
  std::string out = "-";
  bool check = false;
};

/// Compiles every circuit record of the input (matrix records are skipped)
/// and writes one gate-list JSON line per circuit.
inline int cmd_compile_qubits(const CompileCommand& cmd, std::ostream& out, std::ostream& err) {
  const auto docs = parse_json_documents(read_input(cmd.in));
  std::string text;
  bool mismatch = false;
  std::size_t compiled = 0;
  for (const Json& doc : docs) {
    if (doc.contains("rows")) continue;
    const CircuitSpec c = circuit_from_json(doc);
    GateList gates;
    try {
      gates = compile_circuit(c);
    } catch (const DomainError& e) {
      err << "compile-qubits: " << e.what() << "\n";
      return kUsage;
    }
    if (cmd.check && !equal_up_to_global_phase(gates_to_unitary(gates), build_unitary(c), kRoundTripTolerance)) {
      err << "compile-qubits: circuit " << compiled << " does not match its gate list\n";
      mismatch = true;
    }
    text += gates_to_json(gates).dump() + "\n";
    ++compiled;
  }
  if (compiled == 0) {
    err << "compile-qubits: no circuit records in input\n";
    return kUsage;
  }
  write_output(cmd.out, text, out);
  if (cmd.check && !mismatch) err << "compile-qubits: " << compiled << " circuit(s) match up to global phase\n";
  return mismatch ? kVerificationFailed : kOk;
}

// --- jacobian-check ------------------------------------------------------------

struct JacobianCommand {
  std::size_t dim_max = 8;
  std::size_t points = 100;
  std::optional<std::uint64_t> seed;
  std::string report_path;
  bool json_stdout = false;
  unsigned threads = 1;
};

inline int cmd_jacobian_check(const JacobianCommand& cmd, std::ostream& out, std::ostream& err) {
  if (cmd.dim_max < 2 || cmd.points < 1) {
    err << "jacobian-check: need --dim-max >= 2 and --points >= 1\n";
    return kUsage;
  }
  const Json report =
      jacobian_report_to_json(run_jacobian_check(cmd.dim_max, cmd.points, resolve_seed(cmd.seed), cmd.threads));
  if (!cmd.report_path.empty()) write_output(cmd.report_path, report.dump(2) + "\n", out);
  out << (cmd.json_stdout ? report.dump(2) + "\n" : jacobian_report_text(report));
  return report.at("pass").get<bool>() ? kOk : kVerificationFailed;
}

// --- argument parsing ----------------------------------------------------------

namespace detail {
inline CLI::Validator one_of(std::vector<std::string> names) { return CLI::IsMember(std::move(names)); }

inline std::vector<std::string> scheme_names() {
  std::vector<std::string> out;
  for (Scheme s : kAllSchemes) out.emplace_back(to_string(s));
  return out;
}

inline std::vector<std::string> convention_names() {
  std::vector<std::string> out;
  for (Convention c : kAllConventions) out.emplace_back(to_string(c));
  return out;
}

/// CLI11 stores an unset optional as nullopt only if the option was not given.
inline std::optional<std::uint64_t> seed_of(CLI::Option* opt, std::uint64_t value) {
  return opt->count() > 0 ? std::optional<std::uint64_t>(value) : std::nullopt;
}
}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Sample Haar-random unitaries by dialling mesh parameters directly", "haar_dial"};
  app.require_subcommand(1);

  std::string scheme_name = "triangular-adjacent";
  std::string convention_name = "reflectivity";
  std::uint64_t seed_value = 0;
  unsigned threads = 1;
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it")
        ->capture_default_str();
  };

  // sample
  SampleConfig sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw circuits and write them as JSON-lines");
  sample_cmd->add_option("--modes,-m", sample.modes, "Number of modes")->required();
  sample_cmd->add_option("--scheme", scheme_name, "Mesh layout")
      ->check(detail::one_of(detail::scheme_names()))
      ->capture_default_str();
  sample_cmd->add_option("--convention", convention_name, "Coupler parameterization")
      ->check(detail::one_of(detail::convention_names()))
      ->capture_default_str();
  auto* sample_seed = sample_cmd->add_option("--seed", seed_value, "Base seed (circuit k uses seed + k)");
  sample_cmd->add_option("--count,-n", sample.count, "Number of circuits")->capture_default_str();
  sample_cmd->add_option("--out,-o", sample.out, "Output path, - for stdout")->capture_default_str();
  sample_cmd->add_flag("--emit-matrix", sample.emit_matrix, "Also write each unitary as matrix JSON");
  sample_cmd->add_option("--matrix-out", sample.matrix_out, "Separate file for matrix records");
  add_threads(sample_cmd);

  // verify
  VerifyCommand verify;
  std::vector<std::string> verify_schemes = detail::scheme_names();
  std::string verify_format = "text";
  auto* verify_cmd = app.add_subcommand("verify", "Run the Haar certification battery");
  verify_cmd->add_option("--modes,-m", verify.modes, "Number of modes")->capture_default_str();
  verify_cmd->add_option("--samples,-N", verify.samples, "Unitaries per ensemble")->capture_default_str();
  verify_cmd->add_option("--schemes", verify_schemes, "Comma-separated schemes to test")
      ->delimiter(',')
      ->check(detail::one_of(detail::scheme_names()));
  verify_cmd->add_option("--convention", convention_name, "Coupler parameterization")
      ->check(detail::one_of(detail::convention_names()))
      ->capture_default_str();
  auto* verify_seed = verify_cmd->add_option("--seed", seed_value, "Seed");
  verify_cmd->add_option("--report", verify.report_path, "Write the JSON report here");
  verify_cmd->add_option("--format", verify_format, "stdout format")
      ->check(detail::one_of({"text", "json"}))
      ->capture_default_str();
  verify_cmd->add_flag("--inject-bias", verify.inject_bias, "Zero every phase (negative control)")->group("");
  add_threads(verify_cmd);

  // coverage
  CoverageCommand coverage;
  std::string error_mode = "per-component";
  auto* coverage_cmd = app.add_subcommand("coverage", "Coverage curves under reflectivity errors, as CSV");
  coverage_cmd->add_option("--m-max", coverage.config.m_max, "Largest mode count")->capture_default_str();
  coverage_cmd->add_option("--sigmas", coverage.config.sigmas, "Comma-separated error standard deviations")
      ->delimiter(',')
      ->capture_default_str();
  coverage_cmd->add_option("--trials", coverage.config.trials, "Error realizations per point")
      ->capture_default_str();
  coverage_cmd->add_option("--error-mode", error_mode, "One error per coupler or one per circuit")
      ->check(detail::one_of({"per-component", "shared"}))
      ->capture_default_str();
  coverage_cmd->add_option("--scheme", scheme_name, "Mesh layout")
      ->check(detail::one_of(detail::scheme_names()))
      ->capture_default_str();
  auto* coverage_seed = coverage_cmd->add_option("--seed", seed_value, "Seed");
  coverage_cmd->add_option("--out,-o", coverage.out, "CSV path, - for stdout")->capture_default_str();
  add_threads(coverage_cmd);

  // compile-qubits
  CompileCommand compile;
  auto* compile_cmd = app.add_subcommand("compile-qubits", "Compile a 2^p-mode MZI circuit to qubit gates");
  compile_cmd->add_option("--in,-i", compile.in, "Circuit JSON or JSON-lines, - for stdin")->required();
  compile_cmd->add_option("--out,-o", compile.out, "Gate-list output, - for stdout")->capture_default_str();
  compile_cmd->add_flag("--check", compile.check, "Verify the gate list against the mode unitary");

  // jacobian-check
  JacobianCommand jacobian;
  std::string jacobian_format = "text";
  auto* jacobian_cmd = app.add_subcommand("jacobian-check", "Check the change-of-variables Jacobian");
  jacobian_cmd->add_option("--dim-max", jacobian.dim_max, "Largest dimension n")->capture_default_str();
  jacobian_cmd->add_option("--points", jacobian.points, "Random interior points per n")->capture_default_str();
  auto* jacobian_seed = jacobian_cmd->add_option("--seed", seed_value, "Seed");
  jacobian_cmd->add_option("--report", jacobian.report_path, "Write the JSON report here");
  jacobian_cmd->add_option("--format", jacobian_format, "stdout format")
      ->check(detail::one_of({"text", "json"}))
      ->capture_default_str();
  add_threads(jacobian_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (sample_cmd->parsed()) {
      sample.scheme = parse_scheme(scheme_name);
      sample.convention = parse_convention(convention_name);
      sample.seed = detail::seed_of(sample_seed, seed_value);
      sample.threads = threads;
      return cmd_sample(sample, out, err);
    }
    if (verify_cmd->parsed()) {
      verify.schemes.clear();
      for (const auto& s : verify_schemes) verify.schemes.push_back(parse_scheme(s));
      verify.convention = parse_convention(convention_name);
      verify.seed = detail::seed_of(verify_seed, seed_value);
      verify.json_stdout = verify_format == "json";
      verify.threads = threads;
      return cmd_verify(verify, out, err);
    }
    if (coverage_cmd->parsed()) {
      coverage.config.mode = parse_error_mode(error_mode);
      coverage.config.scheme = parse_scheme(scheme_name);
      coverage.config.threads = threads;
      coverage.seed = detail::seed_of(coverage_seed, seed_value);
      return cmd_coverage(coverage, out, err);
    }
    if (compile_cmd->parsed()) return cmd_compile_qubits(compile, out, err);
    if (jacobian_cmd->parsed()) {
      jacobian.seed = detail::seed_of(jacobian_seed, seed_value);
      jacobian.json_stdout = jacobian_format == "json";
      jacobian.threads = threads;
      return cmd_jacobian_check(jacobian, out, err);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::invalid_argument& e) {  // ShapeError, ValidationError
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  err << "error: no subcommand\n";
  return kUsage;
}

}  // namespace haar_dial::cli

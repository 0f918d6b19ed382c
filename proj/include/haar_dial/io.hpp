#pragma once

// File formats: JSON for matrices, circuits, gate lists and reports, CSV for
// coverage curves. Doubles are written in shortest round-trip form, so
// reading a file back reproduces every value bit for bit.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "haar_dial/circuit.hpp"
#include "haar_dial/coverage.hpp"
#include "haar_dial/errors.hpp"
#include "haar_dial/jacobian.hpp"
#include "haar_dial/linalg.hpp"
#include "haar_dial/qubit.hpp"
#include "haar_dial/stats.hpp"

namespace haar_dial {

using Json = nlohmann::ordered_json;

namespace detail {
template <class F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}
}  // namespace detail

// --- matrices ----------------------------------------------------------------

inline Json matrix_to_json(const ComplexMatrix& a) {
  Json entries = Json::array();
  for (const Complex& z : a.entries()) entries.push_back(Json::array({z.real(), z.imag()}));
  return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"entries", std::move(entries)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  return detail::parse_guard("matrix JSON", [&] {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    std::vector<Complex> entries;
    for (const auto& e : j.at("entries")) {
      if (e.size() != 2) throw ValidationError("matrix JSON: entries must be [re, im] pairs");
      entries.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    }
    ComplexMatrix m(rows, cols, std::move(entries));
    if (!m.all_finite()) throw ValidationError("matrix JSON: non-finite entry");
    return m;
  });
}

// --- circuits ----------------------------------------------------------------

inline Json circuit_to_json(const CircuitSpec& c) {
  Json comps = Json::array();
  for (const auto& p : c.components)
    comps.push_back(Json{{"n", p.block_n}, {"i", p.index_i}, {"value", p.value}, {"phi", p.phase_phi}});
  Json out;
  out["modes"] = c.modes;
  out["scheme"] = std::string(to_string(c.scheme));
  out["convention"] = std::string(to_string(c.convention));
  out["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  out["components"] = std::move(comps);
  out["terminal_phases"] = c.terminal_phases;
  return out;
}

inline CircuitSpec circuit_from_json(const Json& j) {
  CircuitSpec c = detail::parse_guard("circuit JSON", [&] {
    CircuitSpec c;
    c.modes = j.at("modes").get<std::size_t>();
    c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    c.convention = parse_convention(j.at("convention").get<std::string>());
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("components"))
      c.components.push_back(
          {p.at("n").get<int>(), p.at("i").get<int>(), p.at("value").get<double>(), p.at("phi").get<double>()});
    c.terminal_phases = j.at("terminal_phases").get<std::vector<double>>();
    return c;
  });
  validate(c);
  return c;
}

// --- gate lists --------------------------------------------------------------

inline Json gates_to_json(const GateList& g) {
  Json gates = Json::array();
  for (const auto& gate : g.gates) {
    Json controls = Json::array();
    for (const auto& c : gate.controls) controls.push_back(Json{{"qubit", c.qubit}, {"value", c.value}});
    Json item;
    item["kind"] = std::string(to_string(gate.kind));
    item["target"] = gate.target;
    item["controls"] = std::move(controls);
    item["phi"] = gate.phi ? Json(*gate.phi) : Json(nullptr);
    gates.push_back(std::move(item));
  }
  return Json{{"qubits", g.qubits}, {"gates", std::move(gates)}};
}

inline GateList gates_from_json(const Json& j) {
  GateList g = detail::parse_guard("gate-list JSON", [&] {
    GateList g;
    g.qubits = j.at("qubits").get<std::size_t>();
    for (const auto& item : j.at("gates")) {
      QubitGate gate;
      gate.kind = parse_gate_kind(item.at("kind").get<std::string>());
      gate.target = item.at("target").get<std::size_t>();
      for (const auto& c : item.at("controls"))
        gate.controls.push_back({c.at("qubit").get<std::size_t>(), c.at("value").get<int>()});
      if (!item.at("phi").is_null()) gate.phi = item.at("phi").get<double>();
      g.gates.push_back(std::move(gate));
    }
    return g;
  });
  validate(g);
  return g;
}

// --- reports -----------------------------------------------------------------

inline Json records_to_json(const std::vector<TestRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records)
    out.push_back(Json{{"name", r.name}, {"statistic", r.statistic}, {"threshold", r.threshold}, {"pass", r.pass}});
  return out;
}

inline Json report_to_json(const EnsembleReport& r) {
  Json tables = Json::object();
  for (const auto& [name, table] : r.entry_moment_tables) tables[name] = table;
  Json out;
  out["m"] = r.m;
  out["sample_count"] = r.sample_count;
  out["seed"] = r.seed;
  out["pass"] = r.all_pass();
  out["tests"] = records_to_json(r.records);
  out["entry_moment_tables"] = std::move(tables);
  return out;
}

inline Json jacobian_report_to_json(const JacobianReport& r) {
  Json dims = Json::array();
  for (const auto& d : r.dimensions) {
    Json item;
    item["n"] = d.n;
    item["points"] = d.points;
    item["max_relative_error"] = d.max_relative_error;
    item["max_exact_relative_error"] = d.max_exact_relative_error;
    item["max_closed_form_error"] = d.max_closed_form_error;
    item["max_final_element_error"] = d.max_final_element_error;
    item["reduction_failures"] = d.reduction_failures;
    dims.push_back(std::move(item));
  }
  Json out;
  out["seed"] = r.seed;
  out["relative_tolerance"] = r.relative_tolerance;
  out["pass"] = r.all_pass();
  out["dimensions"] = std::move(dims);
  return out;
}

inline std::string format_double(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

/// JSON has no infinities; non-finite statistics are stored as null.
inline std::string format_json_number(const Json& v, const char* fmt) {
  return v.is_number() ? format_double(v.get<double>(), fmt) : format_double(NAN, fmt);
}

/// Aligned text table built from a report's JSON form.
inline std::string report_text(const Json& report) {
  std::ostringstream os;
  std::size_t width = 4;
  for (const auto& t : report.at("tests")) width = std::max(width, t.at("name").get<std::string>().size());
  os << "m = " << report.at("m").get<std::size_t>() << ", samples = " << report.at("sample_count").get<std::size_t>()
     << ", seed = " << report.at("seed").get<std::uint64_t>() << "\n";
  os << std::string(width, '-') << "  ----------  ----------  ----\n";
  for (const auto& t : report.at("tests")) {
    const auto name = t.at("name").get<std::string>();
    os << name << std::string(width - name.size(), ' ') << "  "
       << format_json_number(t.at("statistic"), "%10.5g") << "  "
       << format_json_number(t.at("threshold"), "%10.5g") << "  "
       << (t.at("pass").get<bool>() ? "pass" : "FAIL") << "\n";
  }
  os << (report.at("pass").get<bool>() ? "all tests passed" : "some tests FAILED") << "\n";
  return os.str();
}

inline std::string jacobian_report_text(const Json& report) {
  std::ostringstream os;
  os << " n  points  max rel err (FD)  max rel err (exact)  closed-form err  reduction failures\n";
  for (const auto& d : report.at("dimensions")) {
    char line[160];
    std::snprintf(line, sizeof line, "%2zu  %6zu  %16.3e  %19.3e  %15.3e  %18zu\n", d.at("n").get<std::size_t>(),
                  d.at("points").get<std::size_t>(), d.at("max_relative_error").get<double>(),
                  d.at("max_exact_relative_error").get<double>(), d.at("max_closed_form_error").get<double>(),
                  d.at("reduction_failures").get<std::size_t>());
    os << line;
  }
  os << (report.at("pass").get<bool>() ? "all checks passed" : "some checks FAILED") << "\n";
  return os.str();
}

// --- CSV ---------------------------------------------------------------------

inline std::string coverage_csv(const std::vector<CoveragePoint>& points) {
  std::string out = "m,sigma,coverage,stderr\n";
  for (const auto& p : points) {
    out += std::to_string(p.m) + "," + Json(p.sigma).dump() + "," + Json(p.coverage).dump() + "," +
           Json(p.standard_error).dump() + "\n";
  }
  return out;
}

}  // namespace haar_dial

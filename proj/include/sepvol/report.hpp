#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sepvol/estimator.hpp"

namespace sepvol {

inline constexpr const char* kReportSchema = "sepvol/1";

/// One comparison or measurement. `exact` and `pass` are absent for plain
/// measurements.
struct ReportRow {
  std::string scenario;
  std::string quantity;
  std::vector<double> nu;  // sweep rows only
  double value = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int shards = 1;
  std::optional<double> exact;
  std::optional<double> tolerance;
  std::optional<bool> pass;

  std::optional<double> z_score() const {
    if (!exact || !(std_error > 0)) return std::nullopt;
    return (value - *exact) / std_error;
  }
};

struct Report {
  std::string command;
  std::string target;  // suite or scenario
  McConfig config;
  std::vector<ReportRow> rows;

  bool passed() const {
    for (const auto& r : rows)
      if (r.pass && !*r.pass) return false;
    return true;
  }
};

/// Row from an estimate, compared against `exact` when given.
inline ReportRow make_row(std::string scenario, std::string quantity, const Estimate& e,
                          std::optional<double> exact = std::nullopt, std::optional<double> floor = std::nullopt) {
  ReportRow r;
  r.scenario = std::move(scenario);
  r.quantity = std::move(quantity);
  r.value = e.value;
  r.std_error = e.std_error;
  r.samples = e.samples;
  r.seed = e.seed;
  r.shards = e.shards;
  if (exact) {
    r.exact = exact;
    r.tolerance = std::max(3 * e.std_error, floor.value_or(0.0));
    r.pass = std::abs(e.value - *exact) <= *r.tolerance;
  }
  return r;
}

inline nlohmann::ordered_json report_to_json(const Report& rep) {
  using J = nlohmann::ordered_json;
  J j;
  j["schema"] = kReportSchema;
  j["command"] = rep.command;
  j["target"] = rep.target;
  j["config"] = {{"samples", rep.config.samples}, {"seed", rep.config.seed}, {"shards", rep.config.shards}};
  J rows = J::array();
  for (const auto& r : rep.rows) {
    J o;
    o["scenario"] = r.scenario;
    o["quantity"] = r.quantity;
    if (!r.nu.empty()) o["nu"] = r.nu;
    o["value"] = r.value;
    o["stderr"] = r.std_error;
    o["samples"] = r.samples;
    o["seed"] = r.seed;
    o["shards"] = r.shards;
    if (r.exact) o["catalog_value"] = *r.exact;
    if (auto z = r.z_score()) o["z_score"] = *z;
    if (r.tolerance) o["tolerance"] = *r.tolerance;
    if (r.pass) o["pass"] = *r.pass;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  j["passed"] = rep.passed();
  return j;
}

namespace detail {

inline std::string csv_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

/// Header row then one line per row. Sweep reports get nu1..nuk columns.
inline std::string report_to_csv(const Report& rep) {
  using detail::csv_number;
  std::size_t k = 0;
  for (const auto& r : rep.rows) k = std::max(k, r.nu.size());
  std::string out = "scenario,quantity";
  for (std::size_t i = 0; i < k; ++i) out += ",nu" + std::to_string(i + 1);
  out += ",value,stderr,catalog_value,z_score,tolerance,pass,samples,seed,shards\n";
  for (const auto& r : rep.rows) {
    out += detail::csv_field(r.scenario) + "," + detail::csv_field(r.quantity);
    for (std::size_t i = 0; i < k; ++i) out += "," + (i < r.nu.size() ? csv_number(r.nu[i]) : std::string());
    out += "," + csv_number(r.value) + "," + csv_number(r.std_error);
    out += "," + (r.exact ? csv_number(*r.exact) : std::string());
    const auto z = r.z_score();
    out += "," + (z ? csv_number(*z) : std::string());
    out += "," + (r.tolerance ? csv_number(*r.tolerance) : std::string());
    out += "," + (r.pass ? std::string(*r.pass ? "true" : "false") : std::string());
    out += "," + std::to_string(r.samples) + "," + std::to_string(r.seed) + "," + std::to_string(r.shards) + "\n";
  }
  return out;
}

}  // namespace sepvol

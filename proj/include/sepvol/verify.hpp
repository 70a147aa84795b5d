#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sepvol/bounds.hpp"
#include "sepvol/catalog.hpp"
#include "sepvol/report.hpp"

namespace sepvol {

namespace detail {

inline double grid_number(std::string_view t) {
  double v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    throw Error(Errc::ParseError, "bad grid number '" + std::string(t) + "'");
  return v;
}

// FNV-1a, so per-entry seeds do not depend on the standard library.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

}  // namespace detail

/// "a:b:steps" or "a:b:steps,log"; endpoints included.
inline std::vector<double> parse_grid(std::string_view text) {
  bool log = false;
  if (const auto comma = text.find(','); comma != std::string_view::npos) {
    const auto opt = text.substr(comma + 1);
    if (opt != "log" && opt != "lin") throw Error(Errc::ParseError, "grid option must be log or lin");
    log = opt == "log";
    text = text.substr(0, comma);
  }
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw Error(Errc::ParseError, "grid must look like a:b:steps[,log]");
  const double a = detail::grid_number(text.substr(0, c1));
  const double b = detail::grid_number(text.substr(c1 + 1, c2 - c1 - 1));
  const double n = detail::grid_number(text.substr(c2 + 1));
  if (n != std::floor(n)) throw Error(Errc::ParseError, "grid steps must be an integer");
  const int steps = static_cast<int>(n);
  if (!(a > 0) || !(b > a) || steps < 2) throw Error(Errc::DomainError, "grid needs 0 < a < b and steps >= 2");
  std::vector<double> g(steps);
  for (int k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / (steps - 1);
    g[k] = log ? a * std::pow(b / a, t) : a + (b - a) * t;
  }
  g.back() = b;
  return g;
}

/// S along one ratio axis (others held at 1), with catalog values attached
/// when the scenario is cataloged.
inline Report render_sweep(const ScenarioSpec& spec, const std::vector<double>& values, const McConfig& cfg,
                           int axis = 0) {
  const int k = spec.split.ratio_count();
  if (axis < 0 || axis >= k) throw Error(Errc::ArityMismatch, "sweep axis out of range");
  std::vector<RatioCoords> grid;
  for (double v : values) {
    RatioCoords nu{spec.split, std::vector<double>(k, 1.0)};
    nu.values[axis] = v;
    grid.push_back(nu);
  }
  const auto entry = catalog_lookup(spec);
  const SweepTable t = sweep_S(spec, grid, cfg, [&](const RatioCoords& nu) -> std::optional<double> {
    if (entry && entry->S) return eval_S(*entry, nu);
    return std::nullopt;
  });
  Report rep{"sweep", make_alias(spec), cfg, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ReportRow r = make_row(rep.target, "S", t.estimates[i]);
    r.nu = grid[i].values;
    r.exact = t.closed[i];
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

/// c, V_tot, V_sep and P of one scenario, compared to the catalog when an
/// entry carries the value.
inline Report run_estimate(const ScenarioSpec& spec, const McConfig& cfg) {
  const auto entry = catalog_lookup(spec);
  auto exact = [&](const std::optional<ExactValue> CatalogEntry::*field) -> std::optional<double> {
    if (entry && (*entry.*field)) return (*entry.*field)->value;
    return std::nullopt;
  };
  Report rep{"estimate", make_alias(spec), cfg, {}};
  rep.rows.push_back(make_row(rep.target, "c", estimate_c(spec, cfg), exact(&CatalogEntry::c)));
  const auto v = estimate_volumes(spec, cfg);
  rep.rows.push_back(make_row(rep.target, "V_tot", v.v_tot, exact(&CatalogEntry::V_tot)));
  rep.rows.push_back(make_row(rep.target, "V_sep", v.v_sep, exact(&CatalogEntry::V_sep)));
  rep.rows.push_back(make_row(rep.target, "P", v.p, exact(&CatalogEntry::P), 0.01));
  return rep;
}

namespace detail {

inline void verify_bounds(Report& rep, const McConfig& cfg) {
  auto constant = [&](const char* name, double value, double expected) {
    ReportRow r;
    r.scenario = "qq-real-full";
    r.quantity = name;
    r.value = value;
    r.exact = expected;
    r.tolerance = 1e-9;
    r.pass = std::abs(value - expected) <= 1e-9;
    r.seed = cfg.seed;
    r.shards = cfg.shards;
    rep.rows.push_back(r);
  };
  constexpr double pi = std::numbers::pi;
  const double upper = bound_probability(BoundKind::UpperSingleMinor);
  const double upper3 = bound_probability(BoundKind::UpperWith3x3);
  constant("bound:upper-single-minor", upper, 0.5 + 512 / (135 * pi * pi));
  constant("bound:lower-pieced", bound_probability(BoundKind::LowerPieced), 1024 / (135 * pi * pi));
  McConfig c = cfg;
  c.seed = derive_seed(cfg.seed, 1);
  rep.rows.push_back(make_row("qq-real-full", "P:minor14", estimate_relaxed_volumes(Relaxation::Minor14, c).p, upper, 0.01));
  c.seed = derive_seed(cfg.seed, 2);
  rep.rows.push_back(make_row("qq-real-full", "P:minor23", estimate_relaxed_volumes(Relaxation::Minor23, c).p, upper, 0.01));
  c.seed = derive_seed(cfg.seed, 3);
  rep.rows.push_back(
      make_row("qq-real-full", "P:minor14+3x3", estimate_relaxed_volumes(Relaxation::Minor14Plus3x3, c).p, upper3, 0.01));
  const auto& g = nine_point_grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    c.seed = derive_seed(cfg.seed, 10 + k);
    ReportRow r = make_row("qq-real-full", "S:minor14", estimate_approx_S(Relaxation::Minor14, g[k], c),
                           approx_S(Relaxation::Minor14, g[k]));
    r.nu = {g[k]};
    rep.rows.push_back(std::move(r));
  }
}

}  // namespace detail

/// Sampling checks for one suite; see Report::passed for the verdict.
inline Report run_verify_suite(std::string_view suite, const McConfig& cfg) {
  if (!is_suite(suite)) throw Error(Errc::UnknownSuite, "unknown suite '" + std::string(suite) + "'");
  Report rep{"verify", std::string(suite), cfg, {}};
  if (suite == "bounds") {
    detail::verify_bounds(rep, cfg);
    return rep;
  }
  for (const CatalogEntry* e : catalog().suite(suite)) {
    McConfig c = cfg;
    c.seed = derive_seed(cfg.seed, detail::stable_hash(e->alias));
    if (suite == "normalization") {
      const auto v = estimate_volumes(e->spec, c);
      const double h = hs_normalization(e->spec);
      Estimate scaled = v.v_tot;
      scaled.value *= h;
      scaled.std_error *= h;
      rep.rows.push_back(make_row(e->alias, "V_tot*hs", scaled, e->V_tot->value * h));
      if (e->P) rep.rows.push_back(make_row(e->alias, "P", v.p, e->P->value, 0.01));
      continue;
    }
    if (!e->complete()) continue;
    rep.rows.push_back(make_row(e->alias, "P", estimate_volumes(e->spec, c).p, e->P->value, 0.01));
  }
  return rep;
}

}  // namespace sepvol

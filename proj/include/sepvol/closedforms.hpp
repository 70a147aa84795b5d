#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sepvol/expr.hpp"
#include "sepvol/measure.hpp"
#include "sepvol/ppt.hpp"
#include "sepvol/special.hpp"

namespace sepvol {

// ---------------------------------------------------------------------------
// Marginal jacobians
//
// Near nu = 1 the printed forms are 0/0. They are rewritten in
// w = (nu - 1)/(nu + 1), where log(nu) = 2 atanh(w), and the numerator is
// summed as a power series whose low orders cancel identically.

namespace detail {

// Coefficients of (1 - w)^4 p((1 + w)/(1 - w)) for a quartic p.
inline std::array<double, 5> quartic_in_w(const std::array<double, 5>& p) {
  std::array<double, 5> out{};
  for (int i = 0; i <= 4; ++i) {
    // (1 + w)^i (1 - w)^(4 - i)
    std::array<double, 5> t{};
    t[0] = 1;
    int deg = 0;
    auto mul = [&](double s) {
      for (int k = deg + 1; k >= 1; --k) t[k] += s * t[k - 1];
      ++deg;
    };
    for (int k = 0; k < i; ++k) mul(1.0);
    for (int k = 0; k < 4 - i; ++k) mul(-1.0);
    for (int k = 0; k <= 4; ++k) out[k] += p[i] * t[k];
  }
  return out;
}

struct RealJacobianSeries {
  std::array<double, 5> P, Q;  // in w
  std::vector<double> c;       // B(w) = sum_k c[k] w^k

  RealJacobianSeries() {
    P = quartic_in_w({1, 16, 36, 16, 1});
    Q = quartic_in_w({-5, -32, 0, 32, 5});
    c.assign(140, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      double s = 0;
      for (int j = 0; j <= 4 && j <= static_cast<int>(k); ++j) {
        const std::size_t m = k - j;
        if (m % 2 == 1) s += P[j] / static_cast<double>(m);
      }
      c[k] = 12 * s - (k <= 4 ? 5 * Q[k] : 0.0);
    }
  }
};

inline const RealJacobianSeries& real_series() {
  static const RealJacobianSeries s;
  return s;
}

inline double jacobian_real_direct(double nu) {
  const double p = (((nu + 16) * nu + 36) * nu + 16) * nu + 1;
  const double q = 5 * nu * nu * nu * nu + 32 * nu * nu * nu - 32 * nu - 5;
  return std::pow(nu, 1.5) * (6 * p * std::log(nu) - 5 * q) / (3780 * std::pow(nu - 1, 9));
}

inline constexpr double kSeriesWindow = 0.6;

}  // namespace detail

/// Marginal jacobian of the full real 4x4 case.
inline double jacobian_real(double nu) {
  if (!(nu > 0)) return 0;
  if (!std::isfinite(nu)) return 0;
  const double w = (nu - 1) / (nu + 1);
  if (std::abs(w) > detail::kSeriesWindow) return detail::jacobian_real_direct(nu);
  const auto& s = detail::real_series();
  // B(w) / w^9 summed from the top
  double b = 0;
  for (std::size_t k = s.c.size() - 1; k >= 9; --k) b = b * w + s.c[k];
  return std::pow(nu, 1.5) * std::pow(1 - w, 5) * b / (3780.0 * 512.0);
}

/// The same density in mu = sqrt(nu).
inline double jacobian_mu(double mu) {
  if (!(mu > 0)) return 0;
  return 2 * mu * jacobian_real(mu * mu);
}

/// Printed form of the mu-jacobian, for use away from mu = 1.
inline double jacobian_mu_printed(double mu) {
  const double m2 = mu * mu;
  const double poly = ((m2 + 2) * (m2 * m2 + 14 * m2 + 8) * m2 + 1);
  const double q = 5 * std::pow(mu, 8) + 32 * std::pow(mu, 6) - 32 * m2 - 5;
  return std::pow(mu, 4) * (12 * poly * std::log(mu) - 5 * q) / (1890 * std::pow(m2 - 1, 9));
}

/// Marginal jacobian of the real [(1,4),(2,3)] scenario.
inline double jacobian_1423(double nu) {
  if (!(nu > 0) || !std::isfinite(nu)) return 0;
  const double w = (nu - 1) / (nu + 1);
  if (std::abs(w) > detail::kSeriesWindow) {
    const double n = (nu * nu + 4 * nu + 1) * std::log(nu) - 3 * (nu * nu - 1);
    return std::sqrt(nu) * n / (30 * std::pow(nu - 1, 5));
  }
  // B(w) = 2 (6 - 2 w^2) atanh(w) - 12 w = sum_{k odd >= 5} (12/k - 4/(k-2)) w^k
  double b = 0;
  const double w2 = w * w;
  for (int k = 151; k >= 5; k -= 2) b = b * w2 + (12.0 / k - 4.0 / (k - 2));
  return std::sqrt(nu) * std::pow(1 - w, 3) * b / 960.0;
}

/// Density of X Y for independent X ~ BetaPrime(a1, c1), Y ~ BetaPrime(a2, c2).
inline double beta_prime_product_density(double a1, double c1, double a2, double c2, double nu) {
  if (!(nu > 0)) return 0;
  const double lb1 = log_beta(a1, c1), lb2 = log_beta(a2, c2);
  auto fy = [&](double y) {
    if (!(y > 0) || !std::isfinite(y)) return 0.0;
    return std::exp((a2 - 1) * std::log(y) - (a2 + c2) * std::log1p(y) - lb2);
  };
  // x = u/(1-u), U ~ Beta(a1, c1)
  auto f = [&](double u) {
    if (!(u > 0 && u < 1)) return 0.0;
    const double pu = std::exp((a1 - 1) * std::log(u) + (c1 - 1) * std::log1p(-u) - lb1);
    const double x = u / (1 - u);
    return pu * fy(nu / x) / x;
  };
  const double split = 1.0 / (1.0 + 1.0 / nu);  // x = nu
  return integrate_pieces(f, {0.0, std::min(0.5, split), std::max(0.5, split), 1.0}, 1e-300, 1e-12).value;
}

/// Four-index monomial d[a] d[b] / (d[c] d[e]) or two-index d[a] / d[c]
/// (b = e = -1) of a diagonal drawn with weights prod d^w.
struct DiagMonomial {
  int a = -1, b = -1, c = -1, e = -1;
  bool two_index() const { return b < 0; }
};

/// Marginal density of a diagonal monomial, scaled by the Dirichlet mass.
inline double marginal_jacobian(const std::vector<double>& w, const DiagMonomial& m, double nu) {
  const double mass = dirichlet_mass(w);
  if (m.two_index()) {
    const double a = w[m.a] + 1, c = w[m.c] + 1;
    if (!(nu > 0)) return 0;
    return mass * std::exp((a - 1) * std::log(nu) - (a + c) * std::log1p(nu) - log_beta(a, c));
  }
  return mass * beta_prime_product_density(w[m.a] + 1, w[m.c] + 1, w[m.b] + 1, w[m.e] + 1, nu);
}

/// Marginal jacobian of the first ratio variable of a scenario.
inline double scenario_jacobian(const ScenarioSpec& spec, double nu, int ratio = 0) {
  const auto t = ratio_table(spec.split)[ratio];
  return marginal_jacobian(weight_exponents(spec), {t[0], t[1], t[2], t[3]}, nu);
}

// ---------------------------------------------------------------------------
// Catalog types

enum class Status { Exact, Approximate, Corrected, DerivedDual, Partial, Unknown };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Exact: return "exact";
    case Status::Approximate: return "approximate";
    case Status::Corrected: return "corrected";
    case Status::DerivedDual: return "derived-dual";
    case Status::Partial: return "partial";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

inline Status parse_status(std::string_view s) {
  for (Status t : {Status::Exact, Status::Approximate, Status::Corrected, Status::DerivedDual, Status::Partial,
                   Status::Unknown})
    if (s == status_name(t)) return t;
  throw Error(Errc::ParseError, "unknown status '" + std::string(s) + "'");
}

/// Exact constant kept as text alongside its value.
struct ExactValue {
  std::string text;
  double value = 0;

  static ExactValue parse(const std::string& t) { return {t, expr::constant(t)}; }
};

struct Piece {
  std::string region, formula;
  expr::NodePtr region_ast, formula_ast;
};

/// Piecewise separability function. `vars` are the ratio-variable names in
/// order; `defines` introduce derived variables (evaluated in order).
struct PiecewiseS {
  std::vector<std::string> vars;
  std::vector<std::pair<std::string, std::string>> defines;
  std::vector<expr::NodePtr> define_asts;
  std::vector<Piece> pieces;

  int arity() const { return static_cast<int>(vars.size()); }

  /// Value with every variable the pieces read already bound.
  double eval_bound(const expr::Env& env) const {
    for (const auto& p : pieces)
      if (expr::eval(*p.region_ast, env) != 0) return expr::eval(*p.formula_ast, env);
    throw Error(Errc::DomainError, "no piece covers the point");
  }

  /// Names the pieces read after the defines are substituted.
  std::set<std::string> read_names() const {
    std::set<std::string> out;
    for (const auto& p : pieces) {
      expr::free_variables(*p.region_ast, out);
      expr::free_variables(*p.formula_ast, out);
    }
    return out;
  }
};

struct Erratum {
  std::string field, printed, note;
};

struct CatalogEntry {
  std::string alias;
  ScenarioSpec spec;
  std::string suite;
  Status status = Status::Exact;
  std::string cite;
  std::optional<ExactValue> c, S1, V_tot, V_sep, P;
  std::optional<PiecewiseS> S;
  std::vector<Erratum> errata;

  bool complete() const { return S && c && V_tot && V_sep && P; }

  const Erratum* erratum(std::string_view field) const {
    for (const auto& e : errata)
      if (e.field == field) return &e;
    return nullptr;
  }
};

inline PiecewiseS make_piecewise(std::vector<std::string> vars,
                                 std::vector<std::pair<std::string, std::string>> defines,
                                 std::vector<std::pair<std::string, std::string>> pieces) {
  PiecewiseS s;
  s.vars = std::move(vars);
  s.defines = std::move(defines);
  for (const auto& d : s.defines) s.define_asts.push_back(expr::parse(d.second));
  for (auto& [r, f] : pieces) {
    Piece p{r, f, expr::parse(r), expr::parse(f)};
    if (!expr::is_predicate(*p.region_ast)) throw Error(Errc::ParseError, "region '" + r + "' is not a predicate");
    s.pieces.push_back(std::move(p));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Evaluation

inline std::vector<std::string> ratio_names(CompositeSplit split) {
  if (split.ratio_count() == 1) return {"nu"};
  std::vector<std::string> v;
  for (int k = 1; k <= split.ratio_count(); ++k) v.push_back("nu" + std::to_string(k));
  return v;
}

inline expr::Env bind_ratios(const PiecewiseS& s, const RatioCoords& nu) {
  expr::Env env;
  for (std::size_t k = 0; k < nu.values.size(); ++k) env.set(s.vars[k], nu.values[k]);
  for (std::size_t k = 0; k < s.defines.size(); ++k) env.set(s.defines[k].first, expr::eval(*s.define_asts[k], env));
  return env;
}

inline double eval_S(const CatalogEntry& e, const RatioCoords& nu) {
  if (!e.S) throw Error(Errc::MissingS, "no separability function for " + e.alias);
  if (!(nu.split == e.spec.split) || static_cast<int>(nu.values.size()) != e.S->arity())
    throw Error(Errc::ArityMismatch, e.alias + " takes " + std::to_string(e.S->arity()) + " ratio values");
  for (double v : nu.values)
    if (!(v > 0)) throw Error(Errc::NonPositiveRatio, "ratio values must be > 0");
  return e.S->eval_bound(bind_ratios(*e.S, nu));
}

inline double eval_S(const CatalogEntry& e, double nu) { return eval_S(e, RatioCoords{e.spec.split, {nu}}); }

// ---------------------------------------------------------------------------
// Volumes from closed forms

struct ClosedVolumes {
  double v_tot = 0, v_sep = 0, p = 0;
};

namespace detail {

// Diagonal exponents of a name that is a ratio variable or a monomial define.
inline std::optional<std::vector<double>> diag_exponents(const PiecewiseS& s, CompositeSplit split,
                                                         const std::string& name) {
  const auto table = ratio_table(split);
  std::map<std::string, std::vector<double>> known;
  for (std::size_t k = 0; k < s.vars.size(); ++k) {
    std::vector<double> e(split.dim(), 0.0);
    const auto& t = table[k];
    e[t[0]] += 1;
    e[t[1]] += 1;
    e[t[2]] -= 1;
    e[t[3]] -= 1;
    known[s.vars[k]] = e;
  }
  for (std::size_t k = 0; k < s.defines.size(); ++k) {
    auto m = expr::monomial(*s.define_asts[k]);
    if (!m || m->coef != 1.0) continue;
    std::vector<double> e(split.dim(), 0.0);
    bool ok = true;
    for (const auto& [v, p] : m->exps) {
      auto it = known.find(v);
      if (it == known.end()) {
        ok = false;
        break;
      }
      for (int i = 0; i < split.dim(); ++i) e[i] += p * it->second[i];
    }
    if (ok) known[s.defines[k].first] = e;
  }
  auto it = known.find(name);
  if (it == known.end()) return std::nullopt;
  return it->second;
}

inline std::optional<DiagMonomial> as_monomial(const std::vector<double>& e) {
  std::vector<int> pos, neg;
  for (int i = 0; i < static_cast<int>(e.size()); ++i) {
    if (e[i] == 1) pos.push_back(i);
    else if (e[i] == -1) neg.push_back(i);
    else if (e[i] != 0) return std::nullopt;
  }
  if (pos.size() != neg.size() || pos.empty() || pos.size() > 2) return std::nullopt;
  if (pos.size() == 1) return DiagMonomial{pos[0], -1, neg[0], -1};
  return DiagMonomial{pos[0], pos[1], neg[0], neg[1]};
}

inline double beta_pdf(double u, double a, double b, double lb) {
  if (!(u > 0 && u < 1)) return 0;
  return std::exp((a - 1) * std::log(u) + (b - 1) * std::log1p(-u) - lb);
}

// E[f(X)] or E[f(X Y)] for the monomial's BetaPrime representation.
template <class F>
double monomial_expectation(const std::vector<double>& w, const DiagMonomial& m, const F& f) {
  const double a1 = w[m.a] + 1, c1 = w[m.c] + 1, lb1 = log_beta(a1, c1);
  if (m.two_index()) {
    auto g = [&](double u) {
      const double p = beta_pdf(u, a1, c1, lb1);
      return p > 0 ? p * f(u / (1 - u)) : 0.0;
    };
    return integrate_pieces(g, {0.0, 0.5, 1.0}, 1e-300, 1e-12).value;
  }
  const double a2 = w[m.b] + 1, c2 = w[m.e] + 1, lb2 = log_beta(a2, c2);
  auto outer = [&](double u) {
    if (!(u > 0 && u < 1)) return 0.0;
    const double x = u / (1 - u);
    auto inner = [&](double v) {
      const double p = beta_pdf(v, a2, c2, lb2);
      return p > 0 ? p * f(x * v / (1 - v)) : 0.0;
    };
    // x y = 1 on v = 1 - u
    return beta_pdf(u, a1, c1, lb1) * integrate_pieces(inner, {0.0, 1 - u, 1.0}, 1e-300, 1e-12).value;
  };
  return integrate_pieces(outer, {0.0, 0.5, 1.0}, 1e-300, 1e-11).value;
}

}  // namespace detail

/// V_tot, V_sep and P by quadrature of S against the scenario's marginal
/// density. S may read one monomial variable, or two whose diagonal
/// indices are disjoint and on which S factorizes.
inline ClosedVolumes volume_from_closed(const CatalogEntry& e) {
  if (!e.S) throw Error(Errc::MissingS, "no separability function for " + e.alias);
  if (!e.c) throw Error(Errc::MissingS, "no scenario constant for " + e.alias);
  const std::vector<double> w = weight_exponents(e.spec);
  const double mass = dirichlet_mass(w);
  const auto names = e.S->read_names();
  std::vector<std::string> vars(names.begin(), names.end());
  std::vector<DiagMonomial> mons;
  std::vector<std::vector<double>> exps;
  for (const auto& n : vars) {
    auto ex = detail::diag_exponents(*e.S, e.spec.split, n);
    if (!ex) throw Error(Errc::MissingJacobian, e.alias + ": '" + n + "' is not a diagonal monomial");
    auto m = detail::as_monomial(*ex);
    if (!m) throw Error(Errc::MissingJacobian, e.alias + ": '" + n + "' has no product-of-ratios density");
    mons.push_back(*m);
    exps.push_back(*ex);
  }
  ClosedVolumes out;
  out.v_tot = e.c->value * mass;
  auto at = [&](const std::vector<double>& vals) {
    expr::Env env;
    for (std::size_t k = 0; k < vars.size(); ++k) env.set(vars[k], vals[k]);
    return e.S->eval_bound(env);
  };
  if (vars.empty()) {
    out.v_sep = at({}) * mass;
  } else if (vars.size() == 1) {
    out.v_sep = mass * detail::monomial_expectation(w, mons[0], [&](double x) { return at({x}); });
  } else if (vars.size() == 2) {
    for (int i = 0; i < e.spec.n(); ++i)
      if (exps[0][i] != 0 && exps[1][i] != 0)
        throw Error(Errc::MissingJacobian, e.alias + ": variables share diagonal entries");
    const double s11 = at({1, 1});
    bool factor = s11 != 0;
    for (double a : {0.3, 0.8, 1.7, 4.0})
      for (double b : {0.4, 0.9, 2.5})
        if (factor && std::abs(at({a, b}) * s11 - at({a, 1}) * at({1, b})) > 1e-12 * (1 + s11 * s11)) factor = false;
    if (!factor) throw Error(Errc::MissingJacobian, e.alias + ": S does not factorize over its variables");
    const double ex = detail::monomial_expectation(w, mons[0], [&](double x) { return at({x, 1}); });
    const double ey = detail::monomial_expectation(w, mons[1], [&](double y) { return at({1, y}); });
    out.v_sep = mass * ex * ey / s11;
  } else {
    throw Error(Errc::MissingJacobian, e.alias + ": more than two variables");
  }
  out.p = out.v_sep / out.v_tot;
  return out;
}

}  // namespace sepvol

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "sepvol/error.hpp"

namespace sepvol {

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-16) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta_regularized(double a, double b, double x) {
  if (!(a > 0) || !(b > 0) || !(x >= 0) || !(x <= 1))
    throw Error(Errc::DomainError, "incomplete beta needs a, b > 0 and x in [0, 1]");
  if (x == 0) return 0;
  if (x == 1) return 1;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_cf(a, b, x) / a;
  return 1 - front * detail::beta_cf(b, a, 1 - x) / b;
}

/// Unregularized B_x(a, b) = integral_0^x w^(a-1) (1-w)^(b-1) dw.
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0) || !(x >= 0) || !(x <= 1))
    throw Error(Errc::DomainError, "incomplete beta needs a, b > 0 and x in [0, 1]");
  if (x == 0) return 0;
  const double lb = log_beta(a, b);
  if (x == 1) return std::exp(lb);
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_cf(a, b, x) / a;
  return std::exp(lb) - front * detail::beta_cf(b, a, 1 - x) / b;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15) with a global error queue.

struct QuadResult {
  double value = 0;
  double error = 0;
  int evaluations = 0;
};

namespace detail {

inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * kWgk[7], rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace detail

/// Integral of f over [a, b]. Endpoints are never evaluated.
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-14, double rel_tol = 1e-10,
                     int max_segments = 4000) {
  std::priority_queue<detail::Segment> q;
  auto s0 = detail::gk15(f, a, b);
  q.push(s0);
  double total = s0.value, err = s0.error;
  int evals = 15;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && static_cast<int>(q.size()) < max_segments) {
    auto s = q.top();
    q.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      q.push(s);
      break;
    }
    auto l = detail::gk15(f, s.a, m), r = detail::gk15(f, m, s.b);
    evals += 30;
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    q.push(l);
    q.push(r);
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0;
  err = 0;
  while (!q.empty()) {
    total += q.top().value;
    err += q.top().error;
    q.pop();
  }
  return {total, err, evals};
}

/// Integral over [a, b] split at the given interior points.
template <class F>
QuadResult integrate_pieces(const F& f, std::vector<double> cuts, double abs_tol = 1e-14, double rel_tol = 1e-10) {
  std::sort(cuts.begin(), cuts.end());
  QuadResult out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    auto r = integrate(f, cuts[k], cuts[k + 1], abs_tol, rel_tol);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
  }
  return out;
}

/// Integral over (0, inf) as two unit-interval integrals, the upper half
/// through nu = 1/t.
template <class F>
QuadResult integrate_half_line(const F& f, double abs_tol = 1e-14, double rel_tol = 1e-10) {
  auto lower = integrate(f, 0.0, 1.0, abs_tol, rel_tol);
  auto upper = integrate([&](double t) { return f(1.0 / t) / (t * t); }, 0.0, 1.0, abs_tol, rel_tol);
  return {lower.value + upper.value, lower.error + upper.error, lower.evaluations + upper.evaluations};
}

}  // namespace sepvol

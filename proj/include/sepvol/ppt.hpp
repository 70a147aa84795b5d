#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "sepvol/scenario.hpp"

namespace sepvol {

/// Ratio variables replacing the diagonal in the partial-transpose test.
struct RatioCoords {
  CompositeSplit split;
  std::vector<double> values;
};

/// Each ratio is d[a]*d[b] / (d[c]*d[e]), 0-based indices {a, b, c, e}.
inline std::span<const std::array<int, 4>> ratio_table(CompositeSplit s) {
  static constexpr std::array<std::array<int, 4>, 1> qq{{{0, 3, 1, 2}}};
  static constexpr std::array<std::array<int, 4>, 2> qt{{{0, 4, 1, 3}, {1, 5, 2, 4}}};
  static constexpr std::array<std::array<int, 4>, 4> tt{{{0, 4, 1, 3}, {1, 5, 2, 4}, {3, 7, 4, 6}, {4, 8, 5, 7}}};
  static constexpr std::array<std::array<int, 4>, 3> bi{{{0, 5, 1, 4}, {1, 6, 2, 5}, {2, 7, 3, 6}}};
  static constexpr std::array<std::array<int, 4>, 3> tri{{{0, 3, 1, 2}, {3, 4, 2, 5}, {4, 7, 5, 6}}};
  switch (s.kind) {
    case SplitKind::QubitQubit: return qq;
    case SplitKind::QubitQutrit: return qt;
    case SplitKind::QutritQutrit: return tt;
    case SplitKind::ThreeQubitBipartite: return bi;
    case SplitKind::ThreeQubitTripartite: return tri;
  }
  return {};
}

inline RatioCoords ratio_coords(std::span<const double> d, CompositeSplit split) {
  if (static_cast<int>(d.size()) != split.dim())
    throw Error(Errc::ShapeMismatch, "diagonal length " + std::to_string(d.size()));
  for (double x : d)
    if (!(x > 0.0)) throw Error(Errc::ZeroDiagonal, "ratio variables need a strictly positive diagonal");
  RatioCoords r{split, {}};
  for (const auto& t : ratio_table(split)) r.values.push_back(d[t[0]] * d[t[1]] / (d[t[2]] * d[t[3]]));
  return r;
}

/// Unit-trace diagonal whose ratio variables are exactly nu.
inline std::vector<double> canonical_diag(const RatioCoords& nu) {
  const CompositeSplit s = nu.split;
  if (static_cast<int>(nu.values.size()) != s.ratio_count())
    throw Error(Errc::ArityMismatch, "expected " + std::to_string(s.ratio_count()) + " ratio values");
  for (double v : nu.values)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::NonPositiveRatio, "ratio values must be finite and > 0");
  const auto& v = nu.values;
  std::vector<double> d(s.dim(), 1.0);
  switch (s.kind) {
    case SplitKind::QubitQubit:
      d[0] = v[0];
      break;
    case SplitKind::QubitQutrit:
      d[0] = v[0];
      d[5] = v[1];
      break;
    case SplitKind::QutritQutrit:
      d[0] = v[0];
      d[5] = v[1];
      d[7] = v[2];
      d[8] = v[1] * v[2] * v[3];
      break;
    case SplitKind::ThreeQubitBipartite:
      d[0] = v[0];
      d[6] = v[1];
      d[7] = v[1] * v[2];
      break;
    case SplitKind::ThreeQubitTripartite:
      d[0] = v[0];
      d[4] = v[1];
      d[7] = v[2] / v[1];
      break;
  }
  double t = 0;
  for (double x : d) t += x;
  for (double& x : d) x /= t;
  return d;
}

/// Position (0-based) that entry (r, c) occupies after partial transposition.
inline std::pair<int, int> pt_position(int r, int c, CompositeSplit s) {
  const int b = s.dim_b();
  return {(r / b) * b + c % b, (c / b) * b + r % b};
}

inline HermitianMatrix partial_transpose(const HermitianMatrix& m, CompositeSplit split) {
  if (m.order() != split.dim()) throw Error(Errc::ShapeMismatch, "matrix order does not match split");
  const int n = m.order();
  HermitianMatrix out(n, m.field());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const auto [pr, pc] = pt_position(r, c, split);
      out(pr, pc) = m(r, c);
    }
  return out;
}

/// Determinant condition for the 4x4 real partial transpose; z ordered
/// (z12, z13, z14, z23, z24, z34).
inline double det_pt_4x4(const std::array<double, 6>& z, double nu) {
  const double z12 = z[0], z13 = z[1], z14 = z[2], z23 = z[3], z24 = z[4], z34 = z[5];
  const double s = std::sqrt(nu);
  return nu * (z34 * z34 - 1) * z12 * z12 +
         2 * s * (nu * z13 * z14 + z23 * z24 - s * (z14 * z23 + z13 * z24) * z34) * z12 - z23 * z23 -
         nu * z34 * z34 + nu +
         nu * ((z24 * z24 - 1) * z13 * z13 - 2 * z14 * z23 * z24 * z13 - z24 * z24 + z14 * z14 * (z23 * z23 - nu)) +
         2 * s * (z13 * z23 + nu * z14 * z24) * z34;
}

inline constexpr double kPptEps = 1e-10;

/// Precomputed partial-transpose layout for one scenario. Evaluating the
/// predicate at a diagonal touches no heap memory.
class PptKernel {
 public:
  explicit PptKernel(const ScenarioSpec& spec) : spec_(spec), field_(spec.widest()) {
    const int n = spec.n();
    bool all_fixed = true, any_conj_nonreal = false, any_self_nonreal = false, quat_conj = false;
    for (std::size_t k = 0; k < spec.pairs.size(); ++k) {
      const auto& p = spec.pairs[k];
      auto [r, c] = pt_position(p.i - 1, p.j - 1, spec.split);
      Slot s;
      s.i = p.i - 1;
      s.j = p.j - 1;
      s.r = r;
      s.c = c;
      s.field = p.field;
      s.offset = spec.offsets[k];
      slots_.push_back(s);
      const bool self = (r == s.i && c == s.j);
      const bool mirror = (r == s.j && c == s.i);
      if (!self && !mirror) all_fixed = false;
      if (p.field != Field::Real) {
        if (mirror) any_conj_nonreal = true;
        if (self) any_self_nonreal = true;
        if (mirror && p.field == Field::Quaternion) quat_conj = true;
      }
    }
    // The partial transpose is then rho itself or its entrywise conjugate.
    trivial_ = all_fixed && (!any_conj_nonreal || (!any_self_nonreal && !quat_conj));
    fast4_ = spec.split.kind == SplitKind::QubitQubit && field_ == Field::Real;
    if (fast4_) {
      for (const auto& s : slots_) map4_.push_back(pair_index4(s.i, s.j));
    }
    (void)n;
  }

  const ScenarioSpec& spec() const { return spec_; }
  bool trivial() const { return trivial_; }

  /// PPT test at an explicit strictly positive diagonal.
  bool operator()(const double* z, const double* d) const {
    if (trivial_) return true;
    if (fast4_) {
      std::array<double, 6> zz{};
      double m = 0;
      for (std::size_t k = 0; k < slots_.size(); ++k) zz[map4_[k]] = z[slots_[k].offset];
      const double nu = d[0] * d[3] / (d[1] * d[2]);
      const double s = std::sqrt(nu);
      for (int k = 0; k < 6; ++k) {
        double f = k == 2 ? s : (k == 3 ? 1.0 / s : 1.0);
        m = std::max(m, std::abs(zz[k]) * f);
      }
      const double sc = 1.0 + m;
      return det_pt_4x4(zz, nu) >= -kPptEps * nu * sc * sc * sc * sc;
    }
    return general(z, d);
  }

  /// Same test, skipping the four-by-four determinant path.
  bool general(const double* z, const double* d) const {
    if (trivial_) return true;
    const int n = spec_.n();
    if (field_ == Field::Real) {
      detail::Small<double> m;
      m.reset(n);
      double mx = 0;
      for (int k = 0; k < n; ++k) m(k, k) = 1.0;
      for (const auto& s : slots_) {
        const double v = z[s.offset] * std::sqrt(d[s.i] * d[s.j] / (d[s.r] * d[s.c]));
        m(s.r, s.c) = v;
        m(s.c, s.r) = v;
        mx = std::max(mx, std::abs(v));
      }
      return detail::shifted_cholesky_ok(m, kPptEps * (1.0 + mx));
    }
    using C = std::complex<double>;
    detail::Small<C> m;
    double mx = 0;
    if (field_ == Field::Complex) {
      m.reset(n);
      for (int k = 0; k < n; ++k) m(k, k) = 1.0;
      for (const auto& s : slots_) {
        const double f = std::sqrt(d[s.i] * d[s.j] / (d[s.r] * d[s.c]));
        const C v = s.field == Field::Real ? C(z[s.offset] * f, 0.0) : C(z[s.offset] * f, z[s.offset + 1] * f);
        m(s.r, s.c) = v;
        m(s.c, s.r) = std::conj(v);
        mx = std::max(mx, std::abs(v));
      }
      return detail::shifted_cholesky_ok(m, kPptEps * (1.0 + mx));
    }
    m.reset(2 * n);
    for (int k = 0; k < 2 * n; ++k) m(k, k) = 1.0;
    for (const auto& s : slots_) {
      const double f = std::sqrt(d[s.i] * d[s.j] / (d[s.r] * d[s.c]));
      const Quat q = make_quat(s.field, z + s.offset) * f;
      put_embedded(m, s.r, s.c, q);
      put_embedded(m, s.c, s.r, q.conj());
      mx = std::max(mx, std::sqrt(q.norm2()));
    }
    return detail::shifted_cholesky_ok(m, kPptEps * (1.0 + mx));
  }

 private:
  struct Slot {
    int i, j, r, c, offset;
    Field field;
  };

  static int pair_index4(int i, int j) {
    static constexpr int idx[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return idx[i][j];
  }

  static void put_embedded(detail::Small<std::complex<double>>& m, int r, int c, const Quat& q) {
    using C = std::complex<double>;
    m(2 * r, 2 * c) = C(q.w, q.x);
    m(2 * r, 2 * c + 1) = C(q.y, q.z);
    m(2 * r + 1, 2 * c) = C(-q.y, q.z);
    m(2 * r + 1, 2 * c + 1) = C(q.w, -q.x);
  }

  ScenarioSpec spec_;
  Field field_;
  std::vector<Slot> slots_;
  std::vector<int> map4_;
  bool trivial_ = false;
  bool fast4_ = false;
};

/// Caller guarantees positivity_z(spec, z).
inline bool ppt_predicate(const ScenarioSpec& spec, std::span<const double> z, const RatioCoords& nu) {
  check_point(spec, z);
  if (!(nu.split == spec.split)) throw Error(Errc::ArityMismatch, "ratio split does not match scenario");
  const std::vector<double> d = canonical_diag(nu);
  return PptKernel(spec)(z.data(), d.data());
}

/// Oracle: eigenvalues of the explicit partial transpose at diagonal d,
/// after congruence to unit diagonal.
inline bool ppt_by_eigen(const ScenarioSpec& spec, std::span<const double> z, std::span<const double> d,
                         double tol = 1e-9) {
  BloorePoint p{std::vector<double>(d.begin(), d.end()), std::vector<double>(z.begin(), z.end())};
  HermitianMatrix pt = partial_transpose(build_matrix(spec, p), spec.split);
  const int n = pt.order();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) pt(r, c) = pt(r, c) * (1.0 / std::sqrt(d[r] * d[c]));
  return min_eigenvalue(pt) >= -tol * (1.0 + pt.max_abs_entry());
}

}  // namespace sepvol

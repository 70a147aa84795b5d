#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sepvol/detail/dense.hpp"
#include "sepvol/error.hpp"

namespace sepvol {

// ---------------------------------------------------------------------------
// Fields and splits

enum class Field : int { Real = 1, Complex = 2, Quaternion = 4 };

constexpr int components(Field f) { return static_cast<int>(f); }

inline const char* field_name(Field f) {
  switch (f) {
    case Field::Real: return "real";
    case Field::Complex: return "complex";
    case Field::Quaternion: return "quaternion";
  }
  return "?";
}

inline Field parse_field(std::string_view s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  if (s == "quaternion") return Field::Quaternion;
  throw Error(Errc::ParseError, "unknown field '" + std::string(s) + "'");
}

enum class SplitKind { QubitQubit, QubitQutrit, QutritQutrit, ThreeQubitBipartite, ThreeQubitTripartite };

/// Composite system: the matrix order is dim_a * dim_b and the partial
/// transpose swaps the second-factor indices.
struct CompositeSplit {
  SplitKind kind = SplitKind::QubitQubit;

  constexpr int dim_a() const {
    switch (kind) {
      case SplitKind::QubitQubit: return 2;
      case SplitKind::QubitQutrit: return 2;
      case SplitKind::QutritQutrit: return 3;
      case SplitKind::ThreeQubitBipartite: return 2;
      case SplitKind::ThreeQubitTripartite: return 4;
    }
    return 0;
  }
  constexpr int dim_b() const {
    switch (kind) {
      case SplitKind::QubitQubit: return 2;
      case SplitKind::QubitQutrit: return 3;
      case SplitKind::QutritQutrit: return 3;
      case SplitKind::ThreeQubitBipartite: return 4;
      case SplitKind::ThreeQubitTripartite: return 2;
    }
    return 0;
  }
  constexpr int dim() const { return dim_a() * dim_b(); }
  constexpr int ratio_count() const { return (dim_a() - 1) * (dim_b() - 1); }

  friend constexpr bool operator==(CompositeSplit a, CompositeSplit b) { return a.kind == b.kind; }
};

inline constexpr CompositeSplit kQubitQubit{SplitKind::QubitQubit};
inline constexpr CompositeSplit kQubitQutrit{SplitKind::QubitQutrit};
inline constexpr CompositeSplit kQutritQutrit{SplitKind::QutritQutrit};
inline constexpr CompositeSplit kThreeQubitBipartite{SplitKind::ThreeQubitBipartite};
inline constexpr CompositeSplit kThreeQubitTripartite{SplitKind::ThreeQubitTripartite};

inline const char* split_name(CompositeSplit s) {
  switch (s.kind) {
    case SplitKind::QubitQubit: return "qubit-qubit";
    case SplitKind::QubitQutrit: return "qubit-qutrit";
    case SplitKind::QutritQutrit: return "qutrit-qutrit";
    case SplitKind::ThreeQubitBipartite: return "3qubit-bipartite";
    case SplitKind::ThreeQubitTripartite: return "3qubit-tripartite";
  }
  return "?";
}

inline CompositeSplit parse_split(std::string_view s) {
  for (auto k : {SplitKind::QubitQubit, SplitKind::QubitQutrit, SplitKind::QutritQutrit,
                 SplitKind::ThreeQubitBipartite, SplitKind::ThreeQubitTripartite})
    if (s == split_name(CompositeSplit{k})) return CompositeSplit{k};
  throw Error(Errc::ParseError, "unknown split '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Scenario

struct Pair {
  int i = 0;  // 1-based, i < j
  int j = 0;
  Field field = Field::Real;

  friend bool operator==(const Pair&, const Pair&) = default;
};

struct ScenarioSpec {
  CompositeSplit split;
  std::vector<Pair> pairs;  // sorted row-major
  std::vector<int> offsets;  // start of each pair's components in a flat z vector
  int nullified = 0;
  int dimension = 0;
  int total_components = 0;  // F

  int n() const { return split.dim(); }

  Field widest() const {
    Field w = Field::Real;
    for (const auto& p : pairs)
      if (components(p.field) > components(w)) w = p.field;
    return w;
  }

  friend bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
    return a.split == b.split && a.pairs == b.pairs;
  }
};

inline ScenarioSpec make_scenario(CompositeSplit split, std::vector<Pair> pairs) {
  const int n = split.dim();
  for (const auto& p : pairs) {
    if (p.i < 1 || p.j > n || p.i >= p.j)
      throw Error(Errc::IndexOutOfRange,
                  "pair (" + std::to_string(p.i) + "," + std::to_string(p.j) + ") for n=" + std::to_string(n));
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < pairs.size(); ++k)
    if (pairs[k].i == pairs[k - 1].i && pairs[k].j == pairs[k - 1].j)
      throw Error(Errc::DuplicatePair, "pair (" + std::to_string(pairs[k].i) + "," + std::to_string(pairs[k].j) + ")");

  ScenarioSpec s;
  s.split = split;
  s.pairs = std::move(pairs);
  int off = 0;
  for (const auto& p : s.pairs) {
    s.offsets.push_back(off);
    off += components(p.field);
  }
  s.total_components = off;
  s.nullified = n * (n - 1) / 2 - static_cast<int>(s.pairs.size());
  s.dimension = (n - 1) + off;
  return s;
}

// ---------------------------------------------------------------------------
// Quaternions, component order (1, i, j, k)

struct Quat {
  double w = 0, x = 0, y = 0, z = 0;

  Quat conj() const { return {w, -x, -y, -z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
  }
  friend bool operator==(const Quat&, const Quat&) = default;
};

/// Sampled point: diagonal plus flattened z components in pair order.
struct BloorePoint {
  std::vector<double> diag;
  std::vector<double> z;
};

/// n x n Hermitian matrix stored with quaternion-valued entries; the field
/// tag records which components may be nonzero.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  HermitianMatrix(int n, Field f) : n_(n), field_(f), a_(static_cast<std::size_t>(n) * n) {}

  int order() const { return n_; }
  Field field() const { return field_; }
  Quat& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
  const Quat& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

  /// Sets (r,c) and its Hermitian mirror.
  void set(int r, int c, const Quat& q) {
    (*this)(r, c) = q;
    (*this)(c, r) = q.conj();
  }

  double trace() const {
    double t = 0;
    for (int k = 0; k < n_; ++k) t += (*this)(k, k).w;
    return t;
  }

  double max_offdiag() const {
    double m = 0;
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c)
        if (r != c) m = std::max(m, std::sqrt((*this)(r, c).norm2()));
    return m;
  }

  double max_abs_entry() const {
    double m = 0;
    for (const auto& q : a_) m = std::max(m, std::sqrt(q.norm2()));
    return m;
  }

 private:
  int n_ = 0;
  Field field_ = Field::Real;
  std::vector<Quat> a_;
};

inline Quat make_quat(Field f, const double* c) {
  Quat q;
  q.w = c[0];
  if (components(f) >= 2) q.x = c[1];
  if (components(f) == 4) {
    q.y = c[2];
    q.z = c[3];
  }
  return q;
}

inline void check_point(const ScenarioSpec& spec, std::span<const double> z) {
  if (static_cast<int>(z.size()) != spec.total_components)
    throw Error(Errc::ShapeMismatch, "expected " + std::to_string(spec.total_components) + " z components, got " +
                                         std::to_string(z.size()));
}

inline HermitianMatrix build_matrix(const ScenarioSpec& spec, const BloorePoint& p) {
  const int n = spec.n();
  if (static_cast<int>(p.diag.size()) != n)
    throw Error(Errc::ShapeMismatch, "diagonal length " + std::to_string(p.diag.size()));
  check_point(spec, p.z);
  HermitianMatrix m(n, spec.widest());
  for (int k = 0; k < n; ++k) m(k, k) = Quat{p.diag[k], 0, 0, 0};
  for (std::size_t k = 0; k < spec.pairs.size(); ++k) {
    const auto& pr = spec.pairs[k];
    const double s = std::sqrt(p.diag[pr.i - 1] * p.diag[pr.j - 1]);
    m.set(pr.i - 1, pr.j - 1, make_quat(pr.field, p.z.data() + spec.offsets[k]) * s);
  }
  return m;
}

/// Unit-diagonal matrix of z values (the diagonal-free factor).
inline HermitianMatrix z_matrix(const ScenarioSpec& spec, std::span<const double> z) {
  check_point(spec, z);
  const int n = spec.n();
  HermitianMatrix m(n, spec.widest());
  for (int k = 0; k < n; ++k) m(k, k) = Quat{1, 0, 0, 0};
  for (std::size_t k = 0; k < spec.pairs.size(); ++k) {
    const auto& pr = spec.pairs[k];
    m.set(pr.i - 1, pr.j - 1, make_quat(pr.field, z.data() + spec.offsets[k]));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Complex views

inline Eigen::MatrixXcd quaternion_embed(const HermitianMatrix& m) {
  const int n = m.order();
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  using C = std::complex<double>;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Quat& q = m(r, c);
      e(2 * r, 2 * c) = C(q.w, q.x);
      e(2 * r, 2 * c + 1) = C(q.y, q.z);
      e(2 * r + 1, 2 * c) = C(-q.y, q.z);
      e(2 * r + 1, 2 * c + 1) = C(q.w, -q.x);
    }
  return e;
}

/// Complex n x n form; only valid when no j/k components are present.
inline Eigen::MatrixXcd to_complex(const HermitianMatrix& m) {
  const int n = m.order();
  Eigen::MatrixXcd e(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Quat& q = m(r, c);
      if (q.y != 0.0 || q.z != 0.0) throw Error(Errc::DomainError, "quaternionic entry in complex view");
      e(r, c) = {q.w, q.x};
    }
  return e;
}

/// Eigenvalues of m (quaternionic matrices: one copy of each doubled pair).
inline Eigen::VectorXd eigenvalues(const HermitianMatrix& m) {
  if (m.field() != Field::Quaternion) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_complex(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(quaternion_embed(m), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::VectorXd half(m.order());
  for (int k = 0; k < m.order(); ++k) half[k] = 0.5 * (ev[2 * k] + ev[2 * k + 1]);
  return half;
}

inline double min_eigenvalue(const HermitianMatrix& m) { return eigenvalues(m).minCoeff(); }

// ---------------------------------------------------------------------------
// Minors

namespace detail {

inline void load_complex(const HermitianMatrix& m, Small<std::complex<double>>& s) {
  const int n = m.order();
  s.reset(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) s(r, c) = {m(r, c).w, m(r, c).x};
}

inline void load_real(const HermitianMatrix& m, Small<double>& s) {
  const int n = m.order();
  s.reset(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) s(r, c) = m(r, c).w;
}

inline void load_embedded(const HermitianMatrix& m, Small<std::complex<double>>& s) {
  const int n = m.order();
  using C = std::complex<double>;
  s.reset(2 * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Quat& q = m(r, c);
      s(2 * r, 2 * c) = C(q.w, q.x);
      s(2 * r, 2 * c + 1) = C(q.y, q.z);
      s(2 * r + 1, 2 * c) = C(-q.y, q.z);
      s(2 * r + 1, 2 * c + 1) = C(q.w, -q.x);
    }
}

// Moore determinant of a quaternionic leading block from the embedding's
// eigenvalues, which come in equal pairs.
inline double moore_det_by_eigen(const HermitianMatrix& m, int k) {
  Eigen::MatrixXcd e = quaternion_embed(m).topLeftCorner(2 * k, 2 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(e, Eigen::EigenvaluesOnly);
  double d = 1;
  for (int i = 0; i < k; ++i) d *= 0.5 * (es.eigenvalues()[2 * i] + es.eigenvalues()[2 * i + 1]);
  return d;
}

template <class T>
std::vector<double> minors_from(Small<T>& s, const Small<T>& orig) {
  const int n = s.n;
  double piv[kMaxOrder];
  double scale = 0;
  for (int r = 0; r < n; ++r) scale = std::max(scale, mag(orig(r, r)));
  const int ok = hermitian_pivots(s, piv, 1e-14 * std::max(scale, 1e-300));
  std::vector<double> out(n);
  double d = 1;
  for (int k = 0; k < ok; ++k) {
    d *= piv[k];
    out[k] = d;
  }
  for (int k = ok; k < n; ++k) out[k] = re(leading_det(orig, k + 1));
  return out;
}

}  // namespace detail

inline std::vector<double> leading_minors(const HermitianMatrix& m) {
  const int n = m.order();
  if (m.field() == Field::Real) {
    detail::Small<double> s, o;
    detail::load_real(m, s);
    o = s;
    return detail::minors_from(s, o);
  }
  if (m.field() == Field::Complex) {
    detail::Small<std::complex<double>> s, o;
    detail::load_complex(m, s);
    o = s;
    return detail::minors_from(s, o);
  }
  if (2 * n > detail::kMaxOrder) throw Error(Errc::ShapeMismatch, "quaternionic order too large");
  detail::Small<std::complex<double>> s;
  detail::load_embedded(m, s);
  double piv[detail::kMaxOrder];
  double scale = 0;
  for (int r = 0; r < n; ++r) scale = std::max(scale, std::abs(m(r, r).w));
  const int ok = detail::hermitian_pivots(s, piv, 1e-14 * std::max(scale, 1e-300));
  std::vector<double> out(n);
  double d = 1;
  for (int k = 0; k < n; ++k) {
    if (2 * k + 1 < ok) {
      d *= piv[2 * k];
      out[k] = d;
    } else {
      out[k] = detail::moore_det_by_eigen(m, k + 1);
    }
  }
  return out;
}

inline constexpr double kMinorEps = 1e-10;

/// Minor sign test shared by positivity_z: det_k >= -eps * scale^k.
inline bool minors_nonnegative(const std::vector<double>& minors, double scale) {
  double s = 1;
  for (double m : minors) {
    s *= scale;
    if (m < -kMinorEps * s) return false;
  }
  return true;
}

/// Positivity of the unit-diagonal z matrix by leading minors, laid out once
/// per scenario so that repeated calls stay off the heap.
class PositivityKernel {
 public:
  explicit PositivityKernel(const ScenarioSpec& spec) : spec_(spec), field_(spec.widest()) {}

  bool operator()(const double* z) const {
    const int n = spec_.n();
    double piv[detail::kMaxOrder];
    double mx = 0;
    if (field_ == Field::Real) {
      detail::Small<double> m;
      m.reset(n);
      for (int k = 0; k < n; ++k) m(k, k) = 1.0;
      for (std::size_t k = 0; k < spec_.pairs.size(); ++k) {
        const auto& p = spec_.pairs[k];
        const double v = z[spec_.offsets[k]];
        m(p.i - 1, p.j - 1) = v;
        m(p.j - 1, p.i - 1) = v;
        mx = std::max(mx, std::abs(v));
      }
      if (detail::hermitian_pivots(m, piv, 1e-14) < n) return slow(z);
      return check(piv, n, 1, 1.0 + mx);
    }
    using C = std::complex<double>;
    detail::Small<C> m;
    if (field_ == Field::Complex) {
      m.reset(n);
      for (int k = 0; k < n; ++k) m(k, k) = 1.0;
      for (std::size_t k = 0; k < spec_.pairs.size(); ++k) {
        const auto& p = spec_.pairs[k];
        const double* c = z + spec_.offsets[k];
        const C v = p.field == Field::Real ? C(c[0], 0.0) : C(c[0], c[1]);
        m(p.i - 1, p.j - 1) = v;
        m(p.j - 1, p.i - 1) = std::conj(v);
        mx = std::max(mx, std::abs(v));
      }
      if (detail::hermitian_pivots(m, piv, 1e-14) < n) return slow(z);
      return check(piv, n, 1, 1.0 + mx);
    }
    if (2 * n > detail::kMaxOrder) return slow(z);
    m.reset(2 * n);
    for (int k = 0; k < 2 * n; ++k) m(k, k) = 1.0;
    for (std::size_t k = 0; k < spec_.pairs.size(); ++k) {
      const auto& p = spec_.pairs[k];
      const Quat q = make_quat(p.field, z + spec_.offsets[k]);
      put(m, p.i - 1, p.j - 1, q);
      put(m, p.j - 1, p.i - 1, q.conj());
      mx = std::max(mx, std::sqrt(q.norm2()));
    }
    if (detail::hermitian_pivots(m, piv, 1e-14) < 2 * n) return slow(z);
    return check(piv, n, 2, 1.0 + mx);
  }

 private:
  static bool check(const double* piv, int n, int stride, double scale) {
    double d = 1, s = 1;
    for (int k = 0; k < n; ++k) {
      d *= piv[k * stride];
      s *= scale;
      if (d < -kMinorEps * s) return false;
    }
    return true;
  }

  static void put(detail::Small<std::complex<double>>& m, int r, int c, const Quat& q) {
    using C = std::complex<double>;
    m(2 * r, 2 * c) = C(q.w, q.x);
    m(2 * r, 2 * c + 1) = C(q.y, q.z);
    m(2 * r + 1, 2 * c) = C(-q.y, q.z);
    m(2 * r + 1, 2 * c + 1) = C(q.w, -q.x);
  }

  bool slow(const double* z) const {
    const HermitianMatrix zm = z_matrix(spec_, std::span<const double>(z, spec_.total_components));
    return minors_nonnegative(leading_minors(zm), 1.0 + zm.max_offdiag());
  }

  ScenarioSpec spec_;
  Field field_;
};

/// Positivity decided on the unit-diagonal z matrix; the diagonal only
/// contributes positive factors to every minor.
inline bool positivity_z(const ScenarioSpec& spec, std::span<const double> z) {
  check_point(spec, z);
  return PositivityKernel(spec)(z.data());
}

/// Oracle: smallest eigenvalue of the explicit matrix at a given diagonal.
inline bool positivity_by_eigen(const ScenarioSpec& spec, const BloorePoint& p, double tol = 1e-10) {
  const HermitianMatrix m = build_matrix(spec, p);
  return min_eigenvalue(m) >= -tol * (1.0 + m.max_abs_entry());
}

}  // namespace sepvol

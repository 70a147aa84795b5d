#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace sepvol::detail {

inline constexpr int kMaxOrder = 18;

inline double re(double x) { return x; }
inline double re(const std::complex<double>& x) { return x.real(); }
inline double conj(double x) { return x; }
inline std::complex<double> conj(const std::complex<double>& x) { return std::conj(x); }
inline double mag(double x) { return std::abs(x); }
inline double mag(const std::complex<double>& x) { return std::abs(x); }

/// Fixed-capacity square matrix, row-major, no heap traffic.
template <class T>
struct Small {
  int n = 0;
  std::array<T, kMaxOrder * kMaxOrder> a{};

  T& operator()(int r, int c) { return a[r * kMaxOrder + c]; }
  const T& operator()(int r, int c) const { return a[r * kMaxOrder + c]; }

  void reset(int order) {
    n = order;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) (*this)(r, c) = T{};
  }
};

// Gaussian elimination without pivoting on a Hermitian matrix. Writes the
// pivots and returns how many were formed before one fell below `tiny`.
template <class T>
int hermitian_pivots(Small<T>& m, double* piv, double tiny) {
  const int n = m.n;
  for (int k = 0; k < n; ++k) {
    const double p = re(m(k, k));
    piv[k] = p;
    if (std::abs(p) <= tiny) return k;
    for (int i = k + 1; i < n; ++i) {
      const T l = m(i, k) / p;
      if (l == T{}) continue;
      for (int j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return n;
}

/// True iff every Cholesky pivot of m + shift*I is positive.
template <class T>
bool shifted_cholesky_ok(Small<T>& m, double shift) {
  const int n = m.n;
  for (int k = 0; k < n; ++k) {
    const double p = re(m(k, k)) + shift;
    if (!(p > 0.0)) return false;
    for (int i = k + 1; i < n; ++i) {
      const T l = m(i, k) / p;
      if (l == T{}) continue;
      for (int j = k + 1; j <= i; ++j) m(i, j) -= l * conj(m(j, k));
    }
  }
  return true;
}

/// Determinant of the leading k x k block via LU with partial pivoting.
template <class T>
T leading_det(const Small<T>& src, int k) {
  Small<T> m;
  m.n = k;
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) m(r, c) = src(r, c);
  T det = T(1);
  for (int col = 0; col < k; ++col) {
    int best = col;
    for (int r = col + 1; r < k; ++r)
      if (mag(m(r, col)) > mag(m(best, col))) best = r;
    if (mag(m(best, col)) == 0.0) return T{};
    if (best != col) {
      for (int c = 0; c < k; ++c) std::swap(m(best, c), m(col, c));
      det = -det;
    }
    det *= m(col, col);
    for (int r = col + 1; r < k; ++r) {
      const T l = m(r, col) / m(col, col);
      for (int c = col + 1; c < k; ++c) m(r, c) -= l * m(col, c);
    }
  }
  return det;
}

}  // namespace sepvol::detail

#pragma once

// Chebyshev coefficient sequences in the factor-2 convention
//
//   u(y) = a_0 + 2 * sum_{n >= 1} a_n T_n(y),
//
// their geometric-weight norms, discrete convolutions with symmetric
// extension a_{-n} = a_n, and the structural operators T and Lambda used by
// every coefficient map in the library. All routines are templates over the
// scalar type so the same formulas run on doubles and on Interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mems/interval.hpp"

namespace mems {

enum class WeightMode {
  ell_one_nu,        // omega_n = 1 (n = 0), 2 nu^n (n >= 1)
  ell_one_nu_tilde,  // omega_n = 1 (n = 0), 2 nu^n / n (n >= 1)
};

struct Weight {
  double nu = 1.0;
  WeightMode mode = WeightMode::ell_one_nu;

  Weight() = default;
  explicit Weight(double nu_, WeightMode mode_ = WeightMode::ell_one_nu) : nu(nu_), mode(mode_) {
    if (!(nu_ >= 1.0) || !std::isfinite(nu_)) throw std::invalid_argument("weight rate nu must be >= 1");
  }

  [[nodiscard]] Weight tilde() const { return Weight(nu, WeightMode::ell_one_nu_tilde); }
};

/// omega_n for the given weight, computed in the scalar type T.
template <typename T>
T weight_at(const Weight& w, std::size_t n) {
  if (n == 0) return T(1.0);
  T p(1.0);
  const T nu(w.nu);
  for (std::size_t i = 0; i < n; ++i) p = p * nu;
  T omega = T(2.0) * p;
  if (w.mode == WeightMode::ell_one_nu_tilde) omega = omega / T(static_cast<double>(n));
  return omega;
}

/// omega_0 .. omega_{count-1}, built incrementally.
template <typename T>
std::vector<T> weights(const Weight& w, std::size_t count) {
  std::vector<T> out(count);
  T p(1.0);
  const T nu(w.nu);
  for (std::size_t n = 0; n < count; ++n) {
    if (n == 0) {
      out[n] = T(1.0);
    } else {
      p = p * nu;
      out[n] = T(2.0) * p;
      if (w.mode == WeightMode::ell_one_nu_tilde) out[n] = out[n] / T(static_cast<double>(n));
    }
  }
  return out;
}

template <typename T>
struct ChebSeq {
  std::vector<T> coeffs;

  ChebSeq() = default;
  explicit ChebSeq(std::size_t n) : coeffs(n, T(0.0)) {}
  explicit ChebSeq(std::vector<T> c) : coeffs(std::move(c)) {}
  ChebSeq(std::initializer_list<T> c) : coeffs(c) {}

  /// The unit sequence e_n.
  static ChebSeq unit(std::size_t n) {
    ChebSeq e(n + 1);
    e.coeffs[n] = T(1.0);
    return e;
  }

  [[nodiscard]] std::size_t size() const { return coeffs.size(); }
  [[nodiscard]] bool empty() const { return coeffs.empty(); }

  /// Coefficient n, reading the implicit zero tail beyond the stored support.
  [[nodiscard]] T coef(std::size_t n) const { return n < coeffs.size() ? coeffs[n] : T(0.0); }
  /// Coefficient at a two-sided index, a_{-n} = a_n.
  [[nodiscard]] T sym(std::ptrdiff_t n) const {
    return coef(static_cast<std::size_t>(n < 0 ? -n : n));
  }

  T& operator[](std::size_t n) { return coeffs[n]; }
  const T& operator[](std::size_t n) const { return coeffs[n]; }

  /// Copy truncated or zero-padded to exactly `n` stored modes.
  [[nodiscard]] ChebSeq resized(std::size_t n) const {
    ChebSeq r(n);
    for (std::size_t i = 0; i < std::min(n, size()); ++i) r.coeffs[i] = coeffs[i];
    return r;
  }
};

template <typename T>
ChebSeq<T> operator+(const ChebSeq<T>& a, const ChebSeq<T>& b) {
  ChebSeq<T> r(std::max(a.size(), b.size()));
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = a.coef(n) + b.coef(n);
  return r;
}

template <typename T>
ChebSeq<T> operator-(const ChebSeq<T>& a, const ChebSeq<T>& b) {
  ChebSeq<T> r(std::max(a.size(), b.size()));
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = a.coef(n) - b.coef(n);
  return r;
}

template <typename T>
ChebSeq<T> operator*(const T& s, const ChebSeq<T>& a) {
  ChebSeq<T> r(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) r[n] = s * a[n];
  return r;
}

template <typename T>
ChebSeq<T> operator-(const ChebSeq<T>& a) {
  return T(-1.0) * a;
}

/// Point intervals from a double sequence.
inline ChebSeq<Interval> to_interval(const ChebSeq<double>& a) {
  ChebSeq<Interval> r(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) r[n] = Interval(a[n]);
  return r;
}

/// sum_n |a_n| omega_n; an upper bound when T is Interval.
template <typename T>
T norm(const ChebSeq<T>& a, const Weight& w) {
  const auto om = weights<T>(w, a.size());
  T s(0.0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    if constexpr (is_interval_v<T>) {
      s = s + abs(a[n]) * om[n];
    } else {
      s += std::abs(a[n]) * om[n];
    }
  }
  return s;
}

/// sup_n |c_n| / omega_n, the dual of norm().
template <typename T>
T dual_norm(const ChebSeq<T>& c, const Weight& w) {
  const auto om = weights<T>(w, c.size());
  T s(0.0);
  for (std::size_t n = 0; n < c.size(); ++n) {
    if constexpr (is_interval_v<T>) {
      s = max(s, abs(c[n]) / om[n]);
    } else {
      s = std::max(s, std::abs(c[n]) / om[n]);
    }
  }
  return s;
}

/// c_n = sum_{n1 + n2 = n} a_{|n1|} b_{|n2|}; support len(a) + len(b) - 1.
template <typename T>
ChebSeq<T> conv(const ChebSeq<T>& a, const ChebSeq<T>& b) {
  if (a.empty() || b.empty()) return {};
  const auto la = static_cast<std::ptrdiff_t>(a.size());
  const auto lb = static_cast<std::ptrdiff_t>(b.size());
  ChebSeq<T> c(static_cast<std::size_t>(la + lb - 1));
  for (std::ptrdiff_t n = 0; n < la + lb - 1; ++n) {
    T s(0.0);
    // n2 = n - n1 must satisfy |n2| < lb
    const std::ptrdiff_t lo = std::max(-(la - 1), n - (lb - 1));
    const std::ptrdiff_t hi = std::min(la - 1, n + (lb - 1));
    for (std::ptrdiff_t n1 = lo; n1 <= hi; ++n1) {
      const std::ptrdiff_t n2 = n - n1;
      s = s + a.coeffs[static_cast<std::size_t>(n1 < 0 ? -n1 : n1)] *
                  b.coeffs[static_cast<std::size_t>(n2 < 0 ? -n2 : n2)];
    }
    c.coeffs[static_cast<std::size_t>(n)] = s;
  }
  return c;
}

/// (T c)_0 = 0, (T c)_n = c_{n+1} - c_{n-1}; support grows by one.
template <typename T>
ChebSeq<T> apply_T(const ChebSeq<T>& c) {
  if (c.empty()) return {};
  ChebSeq<T> r(c.size() + 1);
  for (std::size_t n = 1; n < r.size(); ++n) r[n] = c.coef(n + 1) - c.coef(n - 1);
  return r;
}

/// (Lambda a)_n = 2 n a_n.
template <typename T>
ChebSeq<T> apply_Lambda(const ChebSeq<T>& a) {
  ChebSeq<T> r(a.size());
  for (std::size_t n = 1; n < a.size(); ++n) r[n] = T(2.0 * static_cast<double>(n)) * a[n];
  return r;
}

/// Differentiation operator D of the integral formulation; same as Lambda.
template <typename T>
ChebSeq<T> apply_D(const ChebSeq<T>& a) {
  return apply_Lambda(a);
}

/// Series value at y = +1.
template <typename T>
T boundary_plus(const ChebSeq<T>& a) {
  T s(0.0);
  for (std::size_t n = 1; n < a.size(); ++n) s = s + a[n];
  return a.coef(0) + T(2.0) * s;
}

/// Series value at y = -1.
template <typename T>
T boundary_minus(const ChebSeq<T>& a) {
  T s(0.0);
  for (std::size_t n = 1; n < a.size(); ++n) s = (n % 2 == 0) ? s + a[n] : s - a[n];
  return a.coef(0) + T(2.0) * s;
}

/// Clenshaw evaluation of a_0 + 2 sum a_n T_n(y); requires |y| <= 1.
template <typename T>
T eval(const ChebSeq<T>& a, double y) {
  if (!(std::abs(y) <= 1.0)) throw std::domain_error("Chebyshev evaluation outside [-1, 1]");
  if (a.empty()) return T(0.0);
  T b1(0.0);
  T b2(0.0);
  const T two_y(2.0 * y);
  for (std::size_t n = a.size() - 1; n >= 1; --n) {
    const T b0 = T(2.0) * a[n] + two_y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return a[0] + T(y) * b1 - b2;
}

/// Coefficients (factor-2 convention) of the derivative series u'.
template <typename T>
ChebSeq<T> derivative(const ChebSeq<T>& a) {
  const std::size_t len = a.size();
  if (len <= 1) return ChebSeq<T>(std::size_t{1});
  // full coefficients c_n of u = sum c_n T_n, derivative d_n of u' = sum d_n T_n
  std::vector<T> d(len + 1, T(0.0));
  for (std::size_t n = len - 1; n >= 1; --n) {
    const T c_n = T(2.0) * a[n];
    d[n - 1] = d[n + 1] + T(2.0 * static_cast<double>(n)) * c_n;
  }
  ChebSeq<T> r(len - 1);
  r[0] = d[0] * T(0.5);
  for (std::size_t n = 1; n + 1 < len; ++n) r[n] = d[n] * T(0.5);
  return r;
}

/// Bound on |(alpha * h^(inf))_k| over ||h||_nu <= 1, where h^(inf) keeps the
/// modes n >= m of h. Valid for any k >= 0; the maximum runs over every j >= m
/// with alpha_{|k-j|} + alpha_{k+j} possibly nonzero.
template <typename T>
T convolution_tail_bound(const ChebSeq<T>& alpha, std::size_t k, std::size_t m, const Weight& w) {
  if (alpha.empty()) return T(0.0);
  const std::size_t deg = alpha.size() - 1;
  T best(0.0);
  if (deg + k < m) return best;
  const std::size_t jmax = deg + k;
  const T nu(w.nu);
  T nu_j(1.0);
  for (std::size_t i = 0; i < m; ++i) nu_j = nu_j * nu;
  for (std::size_t j = m; j <= jmax; ++j) {
    const auto kk = static_cast<std::ptrdiff_t>(k);
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const T c = alpha.sym(kk - jj) + alpha.sym(kk + jj);
    if constexpr (is_interval_v<T>) {
      best = max(best, abs(c) / (T(2.0) * nu_j));
    } else {
      best = std::max(best, std::abs(c) / (2.0 * nu_j));
    }
    nu_j = nu_j * nu;
  }
  return best;
}

/// Psi_k(alpha) for 0 <= k < m; throws std::out_of_range otherwise.
template <typename T>
T psi_bound(const ChebSeq<T>& alpha, std::size_t k, std::size_t m, const Weight& w) {
  if (k >= m) throw std::out_of_range("psi_bound requires k < m");
  return convolution_tail_bound(alpha, k, m, w);
}

/// Chebyshev coefficients (factor-2 convention) of a smooth function on
/// [-1, 1] by Gauss-Chebyshev quadrature.
inline ChebSeq<double> cheb_coefficients(const std::function<double(double)>& f, std::size_t m) {
  const std::size_t nodes = std::max<std::size_t>(256, 4 * m + 64);
  std::vector<double> fv(nodes);
  std::vector<double> theta(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    theta[j] = std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(nodes);
    fv[j] = f(std::cos(theta[j]));
  }
  ChebSeq<double> a(m);
  for (std::size_t n = 0; n < m; ++n) {
    double s = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) s += fv[j] * std::cos(static_cast<double>(n) * theta[j]);
    a[n] = s / static_cast<double>(nodes);
  }
  return a;
}

/// Entry (n, l) of the matrix of h -> alpha * h, with h_l and h_{-l}
/// identified: alpha_n for l = 0, alpha_{|n-l|} + alpha_{n+l} otherwise.
template <typename T>
T conv_matrix_entry(const ChebSeq<T>& alpha, std::size_t n, std::size_t l) {
  const std::size_t d = n >= l ? n - l : l - n;
  if (l == 0) return alpha.coef(d);
  return alpha.coef(d) + alpha.coef(n + l);
}

}  // namespace mems

#pragma once

// Closed real intervals with outward-rounded endpoint arithmetic.
//
// Rounding is realized by nudging every computed endpoint outward with
// std::nextafter, so no floating-point environment state is touched and the
// type is safe to use from any number of threads. Each primitive operation
// rounds to nearest (error <= 0.5 ulp) and then moves `extra_ulps()` ulps
// outward, which keeps the exact result inside the returned interval.

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace mems {

class IntervalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace interval_detail {

inline thread_local int nudge_ulps = 1;

inline double down(double x) {
  for (int i = 0; i < nudge_ulps; ++i) {
    x = std::nextafter(x, -std::numeric_limits<double>::infinity());
  }
  return x;
}

inline double up(double x) {
  for (int i = 0; i < nudge_ulps; ++i) {
    x = std::nextafter(x, std::numeric_limits<double>::infinity());
  }
  return x;
}

}  // namespace interval_detail

/// Number of ulps every endpoint is pushed outward (per thread, default 1).
inline int extra_ulps() { return interval_detail::nudge_ulps; }

/// RAII override of the per-thread outward nudge, used by soundness probes.
class ScopedNudge {
 public:
  explicit ScopedNudge(int ulps) : saved_(interval_detail::nudge_ulps) {
    if (ulps < 1) throw IntervalError("outward nudge must be at least one ulp");
    interval_detail::nudge_ulps = ulps;
  }
  ~ScopedNudge() { interval_detail::nudge_ulps = saved_; }
  ScopedNudge(const ScopedNudge&) = delete;
  ScopedNudge& operator=(const ScopedNudge&) = delete;

 private:
  int saved_;
};

class Interval {
 public:
  constexpr Interval() = default;
  // Implicit on purpose: a double is the degenerate interval [x, x].
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw IntervalError("invalid interval endpoints");
    }
  }

  [[nodiscard]] constexpr double lo() const { return lo_; }
  [[nodiscard]] constexpr double hi() const { return hi_; }
  [[nodiscard]] double mid() const { return lo_ + 0.5 * (hi_ - lo_); }
  [[nodiscard]] double width() const { return interval_detail::up(hi_ - lo_); }

  [[nodiscard]] constexpr bool contains(double x) const { return lo_ <= x && x <= hi_; }
  [[nodiscard]] constexpr bool contains(const Interval& o) const {
    return lo_ <= o.lo_ && o.hi_ <= hi_;
  }
  [[nodiscard]] constexpr bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  [[nodiscard]] constexpr bool overlaps(const Interval& o) const {
    return lo_ <= o.hi_ && o.lo_ <= hi_;
  }
  [[nodiscard]] constexpr bool is_point() const { return lo_ == hi_; }
  [[nodiscard]] constexpr bool certainly_positive() const { return lo_ > 0.0; }
  [[nodiscard]] constexpr bool certainly_negative() const { return hi_ < 0.0; }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval operator-(const Interval& x) { return raw(-x.hi_, -x.lo_); }

  friend Interval operator+(const Interval& x, const Interval& y) {
    return raw(interval_detail::down(x.lo_ + y.lo_), interval_detail::up(x.hi_ + y.hi_));
  }

  friend Interval operator-(const Interval& x, const Interval& y) {
    return raw(interval_detail::down(x.lo_ - y.hi_), interval_detail::up(x.hi_ - y.lo_));
  }

  friend Interval operator*(const Interval& x, const Interval& y) {
    if (x.is_point() && y.is_point()) {
      if (x.lo_ == 0.0 || y.lo_ == 0.0) return raw(0.0, 0.0);
      const double p = x.lo_ * y.lo_;
      if (p == 0.0 && x.lo_ != 0.0 && y.lo_ != 0.0) {
        // underflow: the exact product is tiny but nonzero
        const double t = std::numeric_limits<double>::denorm_min();
        return raw(-t, t);
      }
      return raw(interval_detail::down(p), interval_detail::up(p));
    }
    if (y.is_point()) return scale(x, y.lo_);
    if (x.is_point()) return scale(y, x.lo_);
    const double a = x.lo_ * y.lo_;
    const double b = x.lo_ * y.hi_;
    const double c = x.hi_ * y.lo_;
    const double d = x.hi_ * y.hi_;
    return widen_tiny(interval_detail::down(std::min({a, b, c, d})),
                      interval_detail::up(std::max({a, b, c, d})));
  }

  friend Interval operator/(const Interval& x, const Interval& y) {
    if (y.contains_zero()) throw IntervalError("interval division by an interval containing zero");
    const double a = x.lo_ / y.lo_;
    const double b = x.lo_ / y.hi_;
    const double c = x.hi_ / y.lo_;
    const double d = x.hi_ / y.hi_;
    return widen_tiny(interval_detail::down(std::min({a, b, c, d})),
                      interval_detail::up(std::max({a, b, c, d})));
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  static Interval raw(double lo, double hi) {
    Interval r;
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
  }

  // A zero endpoint produced by rounding may hide an underflowed product.
  static Interval widen_tiny(double lo, double hi) {
    constexpr double t = std::numeric_limits<double>::denorm_min();
    if (lo == 0.0) lo = -t;
    if (hi == 0.0) hi = t;
    return raw(lo, hi);
  }

  static Interval scale(const Interval& x, double s) {
    if (s == 0.0) return raw(0.0, 0.0);
    const double a = x.lo_ * s;
    const double b = x.hi_ * s;
    return widen_tiny(interval_detail::down(std::min(a, b)), interval_detail::up(std::max(a, b)));
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Upper bound of |x| over the interval.
inline double mag(const Interval& x) { return std::max(std::abs(x.lo()), std::abs(x.hi())); }

/// Lower bound of |x| over the interval.
inline double mig(const Interval& x) {
  if (x.contains_zero()) return 0.0;
  return std::min(std::abs(x.lo()), std::abs(x.hi()));
}

/// The interval [0, mag(x)]; the enclosure of |x| used by every norm bound.
inline Interval abs(const Interval& x) {
  if (x.lo() >= 0.0) return x;
  if (x.hi() <= 0.0) return -x;
  return Interval(0.0, mag(x));
}

inline Interval hull(const Interval& x, const Interval& y) {
  return Interval(std::min(x.lo(), y.lo()), std::max(x.hi(), y.hi()));
}

/// Interval maximum: encloses max(a, b) for all a in x, b in y.
inline Interval max(const Interval& x, const Interval& y) {
  return Interval(std::max(x.lo(), y.lo()), std::max(x.hi(), y.hi()));
}

inline Interval sqr(const Interval& x) {
  const Interval a = abs(x);
  return a * a;
}

/// Integer power by repeated multiplication.
inline Interval pow(Interval x, unsigned n) {
  Interval r(1.0);
  while (n != 0) {
    if (n & 1U) r *= x;
    n >>= 1U;
    if (n != 0) x = sqr(x);
  }
  return r;
}

/// Outward-rounded square root; requires lo >= 0.
inline Interval sqrt(const Interval& x) {
  if (x.lo() < 0.0) throw IntervalError("interval sqrt of negative lower endpoint");
  return Interval(std::max(0.0, interval_detail::down(std::sqrt(x.lo()))),
                  interval_detail::up(std::sqrt(x.hi())));
}

std::ostream& operator<<(std::ostream& os, const Interval& x);

// Scalar traits shared by templated code that runs on plain doubles or on
// intervals.

inline double upper_abs(double x) { return std::abs(x); }
inline double upper_abs(const Interval& x) { return mag(x); }

inline double upper(double x) { return x; }
inline double upper(const Interval& x) { return x.hi(); }

inline double midpoint(double x) { return x; }
inline double midpoint(const Interval& x) { return x.mid(); }

template <typename T>
inline constexpr bool is_interval_v = std::is_same_v<T, Interval>;

}  // namespace mems

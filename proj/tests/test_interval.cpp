#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mems/interval.hpp"

using mems::Interval;

TEST_CASE("interval basic arithmetic") {
  const Interval s = Interval(1, 2) + Interval(3, 4);
  CHECK(s.lo() <= 4.0);
  CHECK(s.hi() >= 6.0);
  CHECK(s.lo() > 3.9999999);
  CHECK(s.hi() < 6.0000001);

  const Interval p = Interval(1, 2) * Interval(-1, 1);
  CHECK(p.contains(Interval(-2, 2)));
  CHECK(p.lo() > -2.0000001);
  CHECK(p.hi() < 2.0000001);

  const Interval q = Interval(1, 2) / Interval(4, 8);
  CHECK(q.contains(0.125));
  CHECK(q.contains(0.5));
}

TEST_CASE("interval division by zero-containing divisor throws") {
  CHECK_THROWS_AS(Interval(1, 2) / Interval(-1, 1), mems::IntervalError);
  CHECK_THROWS_AS(Interval(1, 2) / Interval(0.0), mems::IntervalError);
  CHECK_THROWS_AS(Interval(2, 1), mems::IntervalError);
}

TEST_CASE("mag and mig") {
  CHECK(mems::mag(Interval(-3, 2)) == 3.0);
  CHECK(mems::mag(Interval(0.0)) == 0.0);
  CHECK(mems::mig(Interval(-3, 2)) == 0.0);
  CHECK(mems::mig(Interval(2, 5)) == 2.0);
}

TEST_CASE("sqrt, sqr and pow enclose the real results") {
  CHECK(mems::sqrt(Interval(2.0)).contains(std::sqrt(2.0)));
  CHECK(mems::sqr(Interval(-2, 1)).contains(Interval(0, 4)));
  const Interval c = mems::pow(Interval(-1.5), 3);
  CHECK(c.contains(-3.375));
  CHECK_THROWS_AS(mems::sqrt(Interval(-1, 1)), mems::IntervalError);
}

TEST_CASE("containment fuzz over 1e5 random operations") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  int failures = 0;
  for (int i = 0; i < 100000; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const Interval x(a, b), y(c, d);
    const double px = a + t(rng) * (b - a);
    const double py = c + t(rng) * (d - c);
    const int op = i % 4;
    if (op == 0) failures += !(x + y).contains(px + py);
    if (op == 1) failures += !(x - y).contains(px - py);
    if (op == 2) failures += !(x * y).contains(px * py);
    if (op == 3 && !y.contains_zero()) failures += !(x / y).contains(px / py);
  }
  CHECK(failures == 0);
}

TEST_CASE("degenerate intervals contain the float result") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  int failures = 0;
  for (int i = 0; i < 20000; ++i) {
    const double a = u(rng), b = u(rng);
    failures += !(Interval(a) + Interval(b)).contains(a + b);
    failures += !(Interval(a) * Interval(b)).contains(a * b);
    failures += !(Interval(a) / Interval(b)).contains(a / b);
  }
  CHECK(failures == 0);
}

TEST_CASE("inclusion isotonicity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> grow(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    double c = u(rng), d = u(rng);
    if (c > d) std::swap(c, d);
    const Interval x(a, b), y(c, d);
    const Interval xb(a - grow(rng), b + grow(rng)), yb(c - grow(rng), d + grow(rng));
    CHECK((xb + yb).contains(x + y));
    CHECK((xb * yb).contains(x * y));
    CHECK((xb - yb).contains(x - y));
  }
}

TEST_CASE("magnitude is submultiplicative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 5000; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const Interval x(a, b), y(c, d);
    CHECK(mems::mag(x * y) <= (Interval(mems::mag(x)) * Interval(mems::mag(y))).hi());
  }
}

TEST_CASE("scoped nudge widens results and restores the default") {
  const Interval x(0.1), y(0.3);
  const Interval narrow = x + y;
  Interval wide;
  {
    mems::ScopedNudge guard(8);
    CHECK(mems::extra_ulps() == 8);
    wide = x + y;
  }
  CHECK(mems::extra_ulps() == 1);
  CHECK(wide.contains(narrow));
  CHECK(wide.width() > narrow.width());
}

TEST_CASE("stream output shows both endpoints") {
  std::ostringstream os;
  os << Interval(1, 2);
  CHECK(os.str() == "[1, 2]");
}

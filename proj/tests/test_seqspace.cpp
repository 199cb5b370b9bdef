#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mems/seqspace.hpp"

using mems::ChebSeq;
using mems::Interval;
using mems::Weight;
using Seq = ChebSeq<double>;

namespace {

Seq random_seq(std::mt19937_64& rng, std::size_t len, double decay = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Seq a(len);
  double s = 1.0;
  for (std::size_t n = 0; n < len; ++n) {
    a[n] = u(rng) * s;
    s *= decay;
  }
  return a;
}

// Direct evaluation by cos(n acos y).
double direct_eval(const Seq& a, double y) {
  double v = a.coef(0);
  for (std::size_t n = 1; n < a.size(); ++n) v += 2.0 * a[n] * std::cos(static_cast<double>(n) * std::acos(y));
  return v;
}

}  // namespace

TEST_CASE("norm examples") {
  CHECK(mems::norm(Seq{5.0}, Weight(1.05)) == doctest::Approx(5.0));
  CHECK(mems::norm(Seq{0.0, 1.0}, Weight(2.0)) == doctest::Approx(4.0));
  CHECK(mems::norm(Seq{1.0, 1.0, 1.0}, Weight(1.05)) == doctest::Approx(5.305).epsilon(1e-14));
  CHECK(mems::norm(Seq{}, Weight(1.05)) == 0.0);
  CHECK_THROWS(Weight(0.5));
}

TEST_CASE("dual norm examples and duality pairing") {
  CHECK(mems::dual_norm(Seq{3.0}, Weight(1.05)) == doctest::Approx(3.0));
  CHECK(mems::dual_norm(Seq{0.0, 4.0}, Weight(2.0)) == doctest::Approx(1.0));
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const Seq a = random_seq(rng, 12);
    const Seq c = random_seq(rng, 12);
    double pair = 0.0;
    for (std::size_t n = 0; n < 12; ++n) pair += c[n] * a[n];
    const Weight w(1.05);
    CHECK(std::abs(pair) <= mems::dual_norm(c, w) * mems::norm(a, w) * (1 + 1e-14));
  }
}

TEST_CASE("convolution examples") {
  std::mt19937_64 rng(1);
  const Seq b = random_seq(rng, 6);
  const Seq c = mems::conv(Seq::unit(0), b);
  REQUIRE(c.size() == b.size());
  for (std::size_t n = 0; n < b.size(); ++n) CHECK(c[n] == b[n]);

  const Seq sq = mems::conv(Seq::unit(1), Seq::unit(1));
  REQUIRE(sq.size() == 3);
  CHECK(sq[0] == 2.0);
  CHECK(sq[1] == 0.0);
  CHECK(sq[2] == 1.0);
}

TEST_CASE("Banach algebra inequality on random pairs") {
  std::mt19937_64 rng(2024);
  for (double nu : {1.0, 1.05, 1.5}) {
    const Weight w(nu);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
      const Seq a = random_seq(rng, 1 + rng() % 15);
      const Seq b = random_seq(rng, 1 + rng() % 15);
      const double lhs = mems::norm(mems::conv(a, b), w);
      const double rhs = mems::norm(a, w) * mems::norm(b, w);
      violations += lhs > rhs * (1.0 + 1e-13);
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("convolution commutes and associates") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const Seq a = random_seq(rng, 7), b = random_seq(rng, 5), c = random_seq(rng, 9);
    const Seq ab = mems::conv(a, b), ba = mems::conv(b, a);
    const Seq l = mems::conv(ab, c), r = mems::conv(a, mems::conv(b, c));
    REQUIRE(l.size() == r.size());
    for (std::size_t n = 0; n < ab.size(); ++n) CHECK(ab[n] == doctest::Approx(ba[n]).epsilon(1e-13));
    for (std::size_t n = 0; n < l.size(); ++n) CHECK(std::abs(l[n] - r[n]) <= 1e-13 * (1.0 + std::abs(l[n])) * 10);
  }
}

TEST_CASE("convolution is the product of the represented functions") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Seq a = random_seq(rng, 8), b = random_seq(rng, 6);
    const Seq c = mems::conv(a, b);
    for (double y : {-1.0, -0.7, -0.1, 0.0, 0.33, 0.9, 1.0}) {
      CHECK(mems::eval(c, y) == doctest::Approx(mems::eval(a, y) * mems::eval(b, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("structural operators T and Lambda") {
  const Seq t = mems::apply_T(Seq::unit(1));
  REQUIRE(t.size() == 3);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == 0.0);
  CHECK(t[2] == -1.0);
  const Seq z = mems::apply_T(Seq(4));
  for (double v : z.coeffs) CHECK(v == 0.0);

  CHECK(mems::apply_Lambda(Seq::unit(0))[0] == 0.0);
  const Seq l2 = mems::apply_Lambda(Seq::unit(2));
  CHECK(l2[2] == 4.0);
  CHECK(mems::apply_D(Seq::unit(2))[2] == 4.0);
}

TEST_CASE("operator T is bounded by 2 nu on sampled unit vectors") {
  std::mt19937_64 rng(99);
  for (double nu : {1.0, 1.05, 1.5}) {
    const Weight w(nu);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      Seq h = random_seq(rng, 1 + rng() % 30);
      const double nh = mems::norm(h, w);
      if (nh == 0.0) continue;
      h = (1.0 / nh) * h;
      worst = std::max(worst, mems::norm(mems::apply_T(h), w));
    }
    // unit vectors e_n / omega_n approach the bound from below
    for (std::size_t n = 0; n < 30; ++n) {
      const Seq e = (1.0 / mems::weight_at<double>(w, n)) * Seq::unit(n);
      worst = std::max(worst, mems::norm(mems::apply_T(e), w));
    }
    CHECK(worst <= 2.0 * nu * (1.0 + 1e-14));
  }
}

TEST_CASE("Lambda maps into the tilde space with twice the tail norm") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const Seq a = random_seq(rng, 10);
    const Weight w(1.05);
    const double lhs = mems::norm(mems::apply_Lambda(a), w.tilde());
    CHECK(lhs == doctest::Approx(2.0 * (mems::norm(a, w) - std::abs(a[0]))).epsilon(1e-13));
  }
}

TEST_CASE("evaluation and boundary functionals") {
  CHECK(mems::eval(Seq{1.0}, 0.37) == 1.0);
  CHECK(mems::eval(Seq{0.0, 1.0}, 0.5) == doctest::Approx(1.0));
  CHECK(mems::boundary_minus(Seq{0.0, 1.0}) == -2.0);
  CHECK(mems::boundary_plus(Seq{0.0, 1.0}) == 2.0);
  CHECK(mems::boundary_minus(Seq{1.0}) == 1.0);
  CHECK(mems::boundary_plus(Seq{1.0}) == 1.0);
  CHECK_THROWS_AS(mems::eval(Seq{1.0}, 1.5), std::domain_error);

  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const Seq a = random_seq(rng, 1 + rng() % 20);
    CHECK(std::abs(mems::eval(a, -1.0) - mems::boundary_minus(a)) <= 1e-14 * 40);
    CHECK(std::abs(mems::eval(a, 1.0) - mems::boundary_plus(a)) <= 1e-14 * 40);
    const double y = -0.95 + 1.9 * static_cast<double>(i % 17) / 16.0;
    CHECK(mems::eval(a, y) == doctest::Approx(direct_eval(a, y)).epsilon(1e-12));
  }
}

TEST_CASE("derivative series matches finite differences") {
  std::mt19937_64 rng(21);
  const Seq a = random_seq(rng, 12, 0.7);
  const Seq d = mems::derivative(a);
  for (double y : {-0.8, -0.2, 0.0, 0.4, 0.9}) {
    const double h = 1e-6;
    const double fd = (mems::eval(a, y + h) - mems::eval(a, y - h)) / (2 * h);
    CHECK(mems::eval(d, y) == doctest::Approx(fd).epsilon(1e-7));
  }
  // derivative rows satisfy 2n a_n = d_{n-1} - d_{n+1}
  for (std::size_t n = 1; n < a.size(); ++n) {
    CHECK(2.0 * static_cast<double>(n) * a[n] == doctest::Approx(d.coef(n - 1) - d.coef(n + 1)).epsilon(1e-12));
  }
}

TEST_CASE("Chebyshev coefficients of cos match the Bessel expansion") {
  // cos(z y) = J0(z) + 2 sum_{n>=1} (-1)^n J_{2n}(z) T_{2n}(y)
  const double z = std::numbers::pi / 2.0;
  const Seq a = mems::cheb_coefficients([z](double y) { return std::cos(z * y); }, 30);
  CHECK(a[0] == doctest::Approx(std::cyl_bessel_j(0.0, z)).epsilon(1e-14));
  for (int n = 1; n < 14; ++n) {
    const double expect = (n % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(2.0 * n, z);
    CHECK(std::abs(a[2 * n] - expect) <= 1e-15);
    CHECK(std::abs(a[2 * n - 1]) <= 1e-16);
  }
}

TEST_CASE("psi bound examples") {
  const Weight w(1.05);
  CHECK(mems::psi_bound(Seq::unit(0), 0, 2, w) == 0.0);
  CHECK(mems::psi_bound(Seq::unit(3), 1, 2, w) == doctest::Approx(1.0 / (2.0 * 1.05 * 1.05)));
  CHECK_THROWS_AS(mems::psi_bound(Seq::unit(3), 2, 2, w), std::out_of_range);
}

TEST_CASE("psi bound dominates sampled tail functionals") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Weight w(1.05);
  const std::size_t m = 6;
  const Seq alpha = random_seq(rng, 11, 0.8);
  for (std::size_t k = 0; k < m; ++k) {
    const double bound = mems::psi_bound(alpha, k, m, w);
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      Seq h(200);
      if (s % 10 == 0) {
        // extremal directions: single tail modes
        const std::size_t j = m + static_cast<std::size_t>(s / 10) % 194;
        h[j] = 1.0;
      } else {
        for (std::size_t n = m; n < 200; ++n) h[n] = u(rng) * std::pow(0.9, static_cast<double>(n - m));
      }
      h = (1.0 / mems::norm(h, w)) * h;
      worst = std::max(worst, std::abs(mems::conv(alpha, h).coef(k)));
    }
    CHECK(worst <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("interval instantiation encloses the float computations") {
  std::mt19937_64 rng(41);
  const Seq a = random_seq(rng, 9), b = random_seq(rng, 7);
  const auto ai = mems::to_interval(a), bi = mems::to_interval(b);
  const auto ci = mems::conv(ai, bi);
  const Seq c = mems::conv(a, b);
  for (std::size_t n = 0; n < c.size(); ++n) CHECK(ci[n].contains(c[n]));
  const Weight w(1.05);
  CHECK(mems::norm(ai, w).contains(mems::norm(a, w)));
  CHECK(mems::eval(ai, 0.3).contains(mems::eval(a, 0.3)));
  CHECK(mems::dual_norm(ai, w).hi() >= mems::dual_norm(a, w));
  CHECK(mems::psi_bound(ai, 2, 5, w).hi() >= mems::psi_bound(a, 2, 5, w));
}

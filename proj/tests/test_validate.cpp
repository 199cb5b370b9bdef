#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mems/errors.hpp"
#include "mems/validate.hpp"

namespace val = mems::validate;
using mems::ChebSeq;
using mems::Interval;
using mems::Weight;

namespace {

constexpr double kFoldLambda = 0.35000411934274817;
constexpr double kFoldCenter = -0.38834671891278438;

ChebSeq<double> random_seq(std::size_t m, std::mt19937& rng, double decay = 0.5) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ChebSeq<double> s(m);
  for (std::size_t n = 0; n < m; ++n) s[n] = u(rng) * std::pow(decay, static_cast<double>(n));
  return s;
}

val::SaddleVec<double> random_point(std::size_t m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  val::SaddleVec<double> x;
  x.lambda = 0.3 + 0.1 * u(rng);
  x.delta = u(rng);
  x.gamma = u(rng);
  for (auto& s : x.a) s = random_seq(m, rng);
  for (auto& s : x.b) s = random_seq(m, rng);
  return x;
}

const val::ProofResult& proof65() {
  static const val::ProofResult p = val::prove_saddle_node(65, 1.05, 1e-6);
  return p;
}

const val::SaddleVec<double>& saddle33() {
  static const val::SaddleVec<double> x = val::compute_saddle(33);
  return x;
}

/// Residual of the full map stored in the unknown layout, tails included.
val::SaddleVec<double> residual_as_vector(const val::SaddleVec<double>& x) {
  const auto r = val::F_saddle(x);
  val::SaddleVec<double> y;
  y.lambda = r.ell;
  y.delta = r.f.eta;
  y.gamma = r.g.eta;
  for (std::size_t j = 0; j < 3; ++j) {
    y.a[j] = r.f.f[j];
    y.b[j] = r.g.f[j];
  }
  return y;
}

double max_abs_diff(const val::SaddleVec<double>& x, const val::SaddleVec<double>& y) {
  double d = std::max({std::abs(x.lambda - y.lambda), std::abs(x.delta - y.delta), std::abs(x.gamma - y.gamma)});
  for (std::size_t j = 0; j < 3; ++j) {
    const std::size_t na = std::max(x.a[j].size(), y.a[j].size());
    for (std::size_t n = 0; n < na; ++n) d = std::max(d, std::abs(x.a[j].coef(n) - y.a[j].coef(n)));
    const std::size_t nb = std::max(x.b[j].size(), y.b[j].size());
    for (std::size_t n = 0; n < nb; ++n) d = std::max(d, std::abs(x.b[j].coef(n) - y.b[j].coef(n)));
  }
  return d;
}

}  // namespace

TEST_CASE("layout partitions the unknowns into nine contiguous groups") {
  const val::Layout L{7};
  CHECK(L.dim() == 45);
  std::size_t next = 0;
  for (const auto& g : L.groups()) {
    CHECK(g.offset == next);
    next += g.size;
  }
  CHECK(next == L.dim());
  CHECK(L.row_f(1) == L.a(1));
  CHECK(L.row_g(2) == L.b(2));
}

TEST_CASE("normalization functional is the value at the midpoint") {
  const ChebSeq<double> b1{0.3, 0.7, 0.25, -0.1, 0.05};
  const double direct = 0.3 + 2.0 * (0.25 * -1.0 + 0.05 * 1.0);
  CHECK(val::ell(b1, 5) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(val::ell(b1, 5) == doctest::Approx(mems::eval(b1, 0.0)).epsilon(1e-14));
  // modes at or beyond m are ignored
  CHECK(val::ell(b1, 3) == doctest::Approx(0.3 - 0.5).epsilon(1e-15));
}

TEST_CASE("zero kernel component leaves only the normalization defect") {
  std::mt19937 rng(5);
  auto x = random_point(8, rng);
  x.gamma = 0.0;
  for (auto& s : x.b) s = ChebSeq<double>(8);
  const auto r = val::F_saddle(x);
  CHECK(r.ell == -1.0);
  CHECK(r.g.eta == 0.0);
  for (const auto& s : r.g.f) {
    for (double c : s.coeffs) CHECK(c == 0.0);
  }
}

TEST_CASE("linearized rows are the directional derivative of the steady map") {
  std::mt19937 rng(11);
  const auto x = random_point(8, rng);
  const double h = 1e-6;
  auto shifted = [&](double eps) {
    mems::steady::SteadyVec<double> s;
    s.lambda = x.lambda;
    s.delta = x.delta + eps * x.gamma;
    for (std::size_t j = 0; j < 3; ++j) s.a[j] = x.a[j] + eps * x.b[j];
    return mems::steady::f_eq(s);
  };
  const auto plus = shifted(h);
  const auto minus = shifted(-h);
  const auto g = val::F_saddle(x).g;
  CHECK(g.eta == doctest::Approx((plus.eta - minus.eta) / (2 * h)).epsilon(1e-6));
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < g.f[j].size(); ++n) {
      const double fd = (plus.f[j].coef(n) - minus.f[j].coef(n)) / (2 * h);
      CHECK(std::abs(g.f[j][n] - fd) <= 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("Jacobian matches central differences of the projected map") {
  std::mt19937 rng(3);
  const std::size_t m = 6;
  const auto x = random_point(m, rng);
  const Eigen::MatrixXd J = val::jacobian(x);
  const Eigen::VectorXd v = val::pack(x);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    Eigen::VectorXd vp = v;
    Eigen::VectorXd vm = v;
    vp(k) += h;
    vm(k) -= h;
    const Eigen::VectorXd fd =
        (val::projected_residual(val::unpack(vp, m)) - val::projected_residual(val::unpack(vm, m))) / (2 * h);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      CHECK(std::abs(J(i, k) - fd(i)) <= 1e-6 * (1.0 + std::abs(fd(i))));
    }
  }
}

TEST_CASE("interval Jacobian encloses the float Jacobian") {
  std::mt19937 rng(9);
  const auto x = random_point(6, rng);
  const Eigen::MatrixXd J = val::jacobian(x);
  const val::Layout L{6};
  val::DenseMatrix<Interval> JI(L.dim(), L.dim());
  val::assemble_DF(val::to_interval(x), JI);
  for (std::size_t i = 0; i < L.dim(); ++i) {
    for (std::size_t k = 0; k < L.dim(); ++k) CHECK(JI(i, k).contains(J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))));
  }
}

TEST_CASE("numerical saddle node at m = 65") {
  const auto& p = proof65();
  CHECK(std::abs(p.xbar.lambda - kFoldLambda) <= 1e-9);
  CHECK(std::abs(mems::eval(p.xbar.a[0], 0.0) - kFoldCenter) <= 1e-9);
  CHECK(p.newton_residual <= 1e-12);
  CHECK(p.kernel_sigma <= 1e-8);
  CHECK(val::ell(p.xbar.b[0], 65) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.inverse_defect <= 1e-10);
}

TEST_CASE("proof closes at m = 65, nu = 1.05") {
  const auto& p = proof65();
  INFO("failure: " << p.failure);
  REQUIRE(p.proved());
  CHECK(p.failure.empty());
  CHECK(p.bounds.Y0.hi() <= 1e-11);
  CHECK(p.bounds.Z0.hi() <= 1e-10);
  CHECK(p.bounds.Z0.hi() + p.bounds.Z1.hi() < 1.0);
  CHECK(*p.bounds.r0 <= p.r_star);
  CHECK(val::radii_polynomial(p.bounds, *p.bounds.r0).hi() < 0.0);
  CHECK(p.lambda_star.contains(p.xbar.lambda));
  CHECK(p.lambda_star.width() <= 1e-10);
  CHECK(std::abs((Interval(4.0) * p.lambda_star).mid() - 1.400016469) <= 1e-6);
  CHECK(p.u_center.contains(mems::eval(p.xbar.a[0], 0.0)));
}

TEST_CASE("A inverts A dagger including the tail modes") {
  const auto& p = proof65();
  const auto A = val::build_A(p.xbar);
  const auto Ad = val::build_A_dagger(p.xbar);
  std::mt19937 rng(21);
  auto x = random_point(75, rng);
  for (auto& s : x.a) s = random_seq(75, rng, 0.9);
  for (auto& s : x.b) s = random_seq(75, rng, 0.9);

  CHECK(max_abs_diff(val::apply(A, val::apply(Ad, x)), x) <= 1e-9);
  CHECK(max_abs_diff(val::apply(Ad, val::apply(A, x)), x) <= 1e-9);

  // tail modes are scaled by 2n and 1/(2n)
  const auto y = val::apply(Ad, x);
  CHECK(y.a[1][70] == doctest::Approx(140.0 * x.a[1][70]).epsilon(1e-15));
  const auto z = val::apply(A, x);
  CHECK(z.b[2][66] == doctest::Approx(x.b[2][66] / 132.0).epsilon(1e-15));
}

TEST_CASE("A dagger agrees with the Jacobian on vectors with tails") {
  const auto& p = proof65();
  const std::size_t m = 65;
  const auto Ad = val::build_A_dagger(p.xbar);
  val::SaddleVec<double> h;
  h.lambda = 0.0;
  h.delta = 0.0;
  h.gamma = 0.0;
  for (auto& s : h.a) s = ChebSeq<double>(m + 4);
  for (auto& s : h.b) s = ChebSeq<double>(m + 4);
  h.a[0][m + 1] = 1.0;
  h.b[0][m + 2] = 1.0;
  // boundary rows see the tail exactly as the Jacobian of the full map does
  const auto y = val::apply(Ad, h);
  const auto base = val::F_saddle(p.xbar);
  const double eps = 1e-7;
  val::SaddleVec<double> xp = p.xbar;
  for (std::size_t j = 0; j < 3; ++j) {
    xp.a[j] = (xp.a[j].resized(m + 4)) + eps * h.a[j];
    xp.b[j] = (xp.b[j].resized(m + 4)) + eps * h.b[j];
  }
  const auto shifted = val::F_saddle(xp);
  CHECK(y.delta == doctest::Approx((shifted.f.eta - base.f.eta) / eps).epsilon(1e-6));
  CHECK(y.a[0][0] == doctest::Approx((shifted.f.f[0].coef(0) - base.f.f[0].coef(0)) / eps).epsilon(1e-6));
  CHECK(y.gamma == doctest::Approx((shifted.g.eta - base.g.eta) / eps).epsilon(1e-6));
  CHECK(y.b[0][0] == doctest::Approx((shifted.g.f[0].coef(0) - base.g.f[0].coef(0)) / eps).epsilon(1e-6));
}

TEST_CASE("Y0 dominates a float evaluation in a different order") {
  const auto& p = proof65();
  const Weight w(1.05);
  const auto A = val::build_A(p.xbar);
  const auto AF = val::apply(A, residual_as_vector(p.xbar));
  const double direct = val::x_norm(val::to_interval(AF), w).mid();
  CHECK(direct <= p.bounds.Y0.hi() * 1.01);
  CHECK(direct >= p.bounds.Y0.hi() * 1e-3);
}

TEST_CASE("wider outward rounding gives overlapping enclosures") {
  const auto& p = proof65();
  const auto xi = val::to_interval(p.xbar);
  const auto narrow = val::F_saddle(xi);
  mems::ScopedNudge wide_rounding(3);
  const auto wide = val::F_saddle(xi);
  const auto flt = val::F_saddle(p.xbar);
  CHECK(narrow.ell.overlaps(wide.ell));
  CHECK(wide.ell.contains(flt.ell));
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < flt.g.f[j].size(); ++n) {
      CHECK(narrow.g.f[j][n].overlaps(wide.g.f[j][n]));
      CHECK(wide.g.f[j][n].contains(flt.g.f[j][n]));
      CHECK(wide.g.f[j][n].width() >= narrow.g.f[j][n].width());
    }
  }
}

TEST_CASE("radii polynomial examples") {
  val::RadiiBounds b;
  b.Y0 = Interval(1e-3);
  b.Z0 = Interval(0.3);
  b.Z1 = Interval(0.3);
  b.Z2 = Interval(1.0);
  const auto ok = val::radii_verify(b, 1.0);
  REQUIRE(ok.r0.has_value());
  CHECK(*ok.r0 == doctest::Approx(0.0025158).epsilon(1e-4));
  CHECK(val::radii_polynomial(b, 0.0026).hi() < 0.0);
  CHECK(val::radii_polynomial(b, *ok.r0).hi() < 0.0);

  SUBCASE("lower root beyond r_star") {
    const auto out = val::radii_verify(b, 1e-3);
    CHECK_FALSE(out.r0.has_value());
    CHECK(out.failure == "lower root exceeds r_star");
  }
  SUBCASE("Y0 too large") {
    b.Y0 = Interval(0.1);
    b.Z1 = Interval(0.25);
    const auto out = val::radii_verify(b, 1.0);
    CHECK_FALSE(out.r0.has_value());
    CHECK(out.failure.find("discriminant") != std::string::npos);
  }
  SUBCASE("no contraction") {
    b.Z1 = Interval(0.7);
    CHECK(val::radii_verify(b, 1.0).failure == "Z0 + Z1 >= 1");
  }
  SUBCASE("inflating the bounds never shrinks the radius") {
    double prev = *ok.r0;
    for (double f : {1.01, 1.1, 1.5}) {
      val::RadiiBounds c = b;
      c.Y0 = Interval(1e-3 * f);
      c.Z2 = Interval(f);
      const auto out = val::radii_verify(c, 1.0);
      REQUIRE(out.r0.has_value());
      CHECK(*out.r0 >= prev);
      prev = *out.r0;
    }
  }
}

TEST_CASE("Z2 at the origin reduces to its r_star terms") {
  const auto& p = proof65();
  const Weight w(1.05);
  const auto A = val::build_A(p.xbar);
  val::SaddleVec<double> zero;
  for (auto& s : zero.a) s = ChebSeq<double>(65);
  for (auto& s : zero.b) s = ChebSeq<double>(65);
  const double r_star = 0.5;
  const Interval z2 = val::bound_Z2(zero, A, w, r_star);
  const Interval expected = Interval(2.0 * 1.05) * val::norm_A(A, w) * Interval(9.0 * r_star);
  CHECK(z2.overlaps(expected));
  CHECK_THROWS_AS(val::bound_Z2(zero, A, w, 0.0), std::invalid_argument);
}

TEST_CASE("defect bounds respond to the approximate inverse") {
  const auto& p = proof65();
  const Weight w(1.05);
  auto A = val::build_A(p.xbar);
  A.finite(5, 5) += 1e-3;
  CHECK(val::bound_Z0(p.xbar, A, w).hi() > 1e3 * p.bounds.Z0.hi());
}

TEST_CASE("norm of A includes the boundary feed of the tail") {
  const auto& p = proof65();
  const Weight w(1.05);
  auto A = val::build_A(p.xbar);
  const Interval with_feed = val::norm_A(A, w);
  A.boundary_tail = false;
  const Interval without = val::norm_A(A, w);
  CHECK(with_feed.hi() >= without.hi());
  CHECK(without.hi() >= 1.0 / 130.0);
}

TEST_CASE("Z1 shrinks with the truncation and beats the componentwise bound") {
  const Weight w(1.05);
  const auto& x33 = saddle33();
  const auto A33 = val::build_A(x33);
  const Interval z33 = val::bound_Z1(x33, A33, w);
  const auto& p = proof65();
  CHECK(p.bounds.Z1.hi() < z33.hi());
  CHECK(z33.hi() <= val::bound_Z1_componentwise(x33, A33, w).hi());
  CHECK(p.bounds.Z1.hi() <= p.bounds.Z1_componentwise.hi());

  auto plain = A33;
  plain.boundary_tail = false;
  CHECK(val::bound_Z1(x33, plain, w).hi() >= z33.hi());
}

TEST_CASE("boundary rows of each sequence component") {
  const val::Layout L{10};
  CHECK(val::boundary_rows(L, 0).minus == L.row_f(0));
  CHECK(val::boundary_rows(L, 0).plus == L.row_eta());
  CHECK_FALSE(val::boundary_rows(L, 2).plus.has_value());
  CHECK(val::boundary_rows(L, 3).plus == L.row_eta_b());
  CHECK_THROWS_AS(val::boundary_rows(L, 6), std::invalid_argument);
}

TEST_CASE("certificate document") {
  const auto& p = proof65();
  const auto j = nlohmann::json::parse(val::certificate_json(p));
  CHECK(j["proved"].get<bool>());
  CHECK(j["m"].get<int>() == 65);
  CHECK(j["Z1"][1].get<double>() < 1.0);
  CHECK(j["r0"].get<double>() > 0.0);
  CHECK(j["xbar"]["a1"].size() == 65);
  CHECK_FALSE(j.contains("seconds_newton"));
  CHECK(val::certificate_json(p) == val::certificate_json(p));
}

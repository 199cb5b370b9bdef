#pragma once

// Steady states of the scaled MEMS equation U'' = lambda / (1 + U)^2 on
// [-1, 1], U(+-1) = 0, written as the first-order polynomial system
//   u1' = u2,  u2' = lambda u3^2,  u3' = -u2 u3^2,  u3 = 1 / (1 + u1),
// and solved in Chebyshev coefficient space through its integral form.

#include <Eigen/Dense>
#include <array>
#include <cstddef>

#include "mems/assembly.hpp"
#include "mems/continuation.hpp"
#include "mems/seqspace.hpp"

namespace mems::steady {

template <typename T>
struct SteadyVec {
  T lambda = T(0.0);
  T delta = T(0.0);  // U'(-1)
  std::array<ChebSeq<T>, 3> a;

  [[nodiscard]] std::size_t modes() const { return a[0].size(); }
};

template <typename T>
struct SteadyResidual {
  T eta = T(0.0);
  std::array<ChebSeq<T>, 3> f;
};

/// The exact solution U = 0 at lambda = 0, stored with m modes.
SteadyVec<double> trivial_state(std::size_t m);

/// Rows of the integral formulation for one component: row 0 is the value at
/// y = -1 minus the initial condition, rows n >= 1 are 2n a_n + (T c)_n.
template <typename T>
ChebSeq<T> ivp_rows(const ChebSeq<T>& a, const ChebSeq<T>& c, const T& initial) {
  const std::size_t len = std::max(a.size(), c.size() + 1);
  ChebSeq<T> r(len);
  r[0] = boundary_minus(a) - initial;
  for (std::size_t n = 1; n < len; ++n) {
    r[n] = T(2.0 * static_cast<double>(n)) * a.coef(n) + (c.coef(n + 1) - c.coef(n - 1));
  }
  return r;
}

/// Right-hand sides (a2, lambda a3^2, -a2 a3^2).
template <typename T>
std::array<ChebSeq<T>, 3> rhs_coeffs(const SteadyVec<T>& s) {
  const ChebSeq<T> a3sq = conv(s.a[2], s.a[2]);
  return {s.a[1], s.lambda * a3sq, -conv(s.a[1], a3sq)};
}

/// Full (untruncated) residual; every component has finite support.
template <typename T>
SteadyResidual<T> f_eq(const SteadyVec<T>& s) {
  const auto c = rhs_coeffs(s);
  SteadyResidual<T> r;
  r.eta = boundary_plus(s.a[0]);
  r.f[0] = ivp_rows(s.a[0], c[0], T(0.0));
  r.f[1] = ivp_rows(s.a[1], c[1], s.delta);
  r.f[2] = ivp_rows(s.a[2], c[2], T(1.0));
  return r;
}

/// Right-hand sides of the linearization along (gamma, b) with lambda fixed:
/// (b2, 2 lambda a3 b3, -a3^2 b2 - 2 a2 a3 b3).
template <typename T>
std::array<ChebSeq<T>, 3> linear_rhs(const T& lambda, const std::array<ChebSeq<T>, 3>& a,
                                     const std::array<ChebSeq<T>, 3>& b) {
  const ChebSeq<T> a3b3 = conv(a[2], b[2]);
  const ChebSeq<T> d2 = T(2.0) * lambda * a3b3;
  const ChebSeq<T> d3 = -(conv(conv(a[2], a[2]), b[1]) + T(2.0) * conv(a[1], a3b3));
  return {b[1], d2, d3};
}

/// Directional derivative of f_eq in (delta, a) along (gamma, b).
template <typename T>
SteadyResidual<T> linearized(const T& lambda, const std::array<ChebSeq<T>, 3>& a, const T& gamma,
                             const std::array<ChebSeq<T>, 3>& b) {
  const auto d = linear_rhs(lambda, a, b);
  SteadyResidual<T> r;
  r.eta = boundary_plus(b[0]);
  r.f[0] = ivp_rows(b[0], d[0], T(0.0));
  r.f[1] = ivp_rows(b[1], d[1], gamma);
  r.f[2] = ivp_rows(b[2], d[2], T(0.0));
  return r;
}

/// Unknown vector (delta, a1, a2, a3), length 3m + 1.
Eigen::VectorXd pack(const SteadyVec<double>& s);
SteadyVec<double> unpack(double lambda, const Eigen::VectorXd& x, std::size_t m);

/// Residual rows (eta, f1, f2, f3) restricted to modes 0..m-1.
Eigen::VectorXd projected_residual(const SteadyVec<double>& s);

/// Jacobian of the projected residual: (3m+1) x (3m+2), columns
/// (lambda, delta, a1, a2, a3).
Eigen::MatrixXd jac_f_eq(const SteadyVec<double>& s);

/// Generic assembly of the same Jacobian into any dense matrix type, with
/// row offset r0 and column offsets for lambda, delta and a1 (a2, a3 follow
/// at +m, +2m). Entries are accumulated.
template <typename Mat>
void assemble_jac_f_eq(const SteadyVec<typename Mat::Scalar>& s, std::size_t m, Mat& J, std::size_t r0,
                       std::size_t col_lambda, std::size_t col_delta, std::size_t col_a) {
  using T = typename Mat::Scalar;
  const ChebSeq<T>& a2 = s.a[1];
  const ChebSeq<T>& a3 = s.a[2];
  const ChebSeq<T> a3sq = conv(a3, a3);
  const ChebSeq<T> a2a3 = conv(a2, a3);
  const std::size_t c1 = col_a;
  const std::size_t c2 = col_a + m;
  const std::size_t c3 = col_a + 2 * m;
  const std::size_t f1 = r0 + 1;
  const std::size_t f2 = f1 + m;
  const std::size_t f3 = f2 + m;

  add_boundary_plus_row(J, r0, c1, m);
  add_ivp_linear_block(J, f1, c1, m);
  add_ivp_linear_block(J, f2, c2, m);
  add_ivp_linear_block(J, f3, c3, m);
  J(f2, col_delta) = J(f2, col_delta) - T(1.0);

  add_T_identity_block(J, f1, c2, m, T(1.0));                  // c1 = a2
  add_T_conv_block(J, f2, c3, a3, m, T(2.0) * s.lambda);        // c2 = lambda a3^2
  add_T_column(J, f2, col_lambda, a3sq, m, T(1.0));
  add_T_conv_block(J, f3, c2, a3sq, m, T(-1.0));               // c3 = -a2 a3^2
  add_T_conv_block(J, f3, c3, a2a3, m, T(-2.0));
}

/// Newton's method in (delta, a) at fixed lambda; throws SolverError.
SteadyVec<double> newton_solve(const SteadyVec<double>& s0, double tol = 1e-12, int max_iter = 30);

/// Continuation problem in (lambda; delta, a) with m modes.
continuation::Problem make_problem(std::size_t m);

/// U(y) of a steady state.
inline double value_at(const SteadyVec<double>& s, double y) { return eval(s.a[0], y); }

/// Continue the steady branch from lambda = 0 through the fold until lambda
/// drops back below `lambda_end` on the upper branch or `max_points` is hit.
continuation::Branch continue_branch(std::size_t m, const continuation::Settings& settings, std::size_t max_points,
                                     double lambda_end = 0.0);

}  // namespace mems::steady

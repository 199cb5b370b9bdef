#pragma once

// Computer-assisted proof of the saddle-node point on the steady branch.
//
// The augmented map F(x) = (l(gamma, b) - 1, f_eq(lambda, delta, a),
// D_{delta,a} f_eq(lambda, delta, a)(gamma, b)) has a nondegenerate zero at
// the fold. A Newton-Kantorovich argument around a numerical zero x_bar,
// with bounds Y0, Z0, Z1, Z2 computed in interval arithmetic, encloses the
// true zero in a ball of radius r0 in the weighted l1 product norm.
//
// Unknown layout (6m + 3): lambda, delta, a1, a2, a3, gamma, b1, b2, b3.
// Residual layout (6m + 3): l - 1, eta(a1), f1, f2, f3, eta(b1), g1, g2, g3.

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mems/assembly.hpp"
#include "mems/continuation.hpp"
#include "mems/interval.hpp"
#include "mems/seqspace.hpp"
#include "mems/steady.hpp"

namespace mems::validate {

template <typename T>
struct SaddleVec {
  T lambda = T(0.0);
  T delta = T(0.0);
  std::array<ChebSeq<T>, 3> a;
  T gamma = T(0.0);
  std::array<ChebSeq<T>, 3> b;

  [[nodiscard]] std::size_t modes() const { return a[0].size(); }
};

template <typename T>
struct SaddleResidual {
  T ell = T(0.0);
  steady::SteadyResidual<T> f;
  steady::SteadyResidual<T> g;
};

/// Row-major dense matrix usable by the assembly helpers for any scalar.
template <typename T>
struct DenseMatrix {
  using Scalar = T;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0.0)) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Index bookkeeping shared by the two layouts.
struct Layout {
  std::size_t m = 0;

  [[nodiscard]] std::size_t dim() const { return 6 * m + 3; }
  // columns
  [[nodiscard]] std::size_t lambda() const { return 0; }
  [[nodiscard]] std::size_t delta() const { return 1; }
  [[nodiscard]] std::size_t a(std::size_t j) const { return 2 + j * m; }
  [[nodiscard]] std::size_t gamma() const { return 3 * m + 2; }
  [[nodiscard]] std::size_t b(std::size_t j) const { return 3 * m + 3 + j * m; }
  // rows
  [[nodiscard]] std::size_t row_ell() const { return 0; }
  [[nodiscard]] std::size_t row_eta() const { return 1; }
  [[nodiscard]] std::size_t row_f(std::size_t j) const { return 2 + j * m; }
  [[nodiscard]] std::size_t row_eta_b() const { return 3 * m + 2; }
  [[nodiscard]] std::size_t row_g(std::size_t j) const { return 3 * m + 3 + j * m; }

  /// Nine component groups in order, with their offsets and sizes; the
  /// same partition applies to rows and columns.
  struct Group {
    std::size_t offset;
    std::size_t size;
    bool sequence;
  };
  [[nodiscard]] std::array<Group, 9> groups() const {
    return {{{0, 1, false},
             {1, 1, false},
             {a(0), m, true},
             {a(1), m, true},
             {a(2), m, true},
             {gamma(), 1, false},
             {b(0), m, true},
             {b(1), m, true},
             {b(2), m, true}}};
  }
};

/// Coefficient of b1_n in the normalization functional: the value at y = 0
/// of the first m modes of b1.
inline double ell_weight(std::size_t n) {
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;
  return (n / 2) % 2 == 0 ? 2.0 : -2.0;
}

/// The normalization functional on the stored modes of b1.
template <typename T>
T ell(const ChebSeq<T>& b1, std::size_t m) {
  T s(0.0);
  for (std::size_t n = 0; n < std::min(m, b1.size()); ++n) {
    if (ell_weight(n) != 0.0) s = s + T(ell_weight(n)) * b1[n];
  }
  return s;
}

/// Full residual of the saddle-node map; every sequence component keeps its
/// complete finite support.
template <typename T>
SaddleResidual<T> F_saddle(const SaddleVec<T>& x) {
  steady::SteadyVec<T> s;
  s.lambda = x.lambda;
  s.delta = x.delta;
  s.a = x.a;
  SaddleResidual<T> r;
  r.ell = ell(x.b[0], x.modes()) - T(1.0);
  r.f = steady::f_eq(s);
  r.g = steady::linearized(x.lambda, x.a, x.gamma, x.b);
  return r;
}

/// Jacobian of the projected map F^(m) at x, accumulated into J
/// ((6m+3) x (6m+3), zero on entry).
template <typename Mat>
void assemble_DF(const SaddleVec<typename Mat::Scalar>& x, Mat& J) {
  using T = typename Mat::Scalar;
  const std::size_t m = x.modes();
  const Layout L{m};

  for (std::size_t n = 0; n < m; ++n) {
    if (ell_weight(n) != 0.0) J(L.row_ell(), L.b(0) + n) = J(L.row_ell(), L.b(0) + n) + T(ell_weight(n));
  }

  steady::SteadyVec<T> s;
  s.lambda = x.lambda;
  s.delta = x.delta;
  s.a = x.a;
  steady::assemble_jac_f_eq(s, m, J, L.row_eta(), L.lambda(), L.delta(), L.a(0));

  // g is linear in (gamma, b) with the same matrix as the (delta, a) block
  const ChebSeq<T>& a2 = x.a[1];
  const ChebSeq<T>& a3 = x.a[2];
  const ChebSeq<T>& b2 = x.b[1];
  const ChebSeq<T>& b3 = x.b[2];
  const ChebSeq<T> a3sq = conv(a3, a3);
  const ChebSeq<T> a2a3 = conv(a2, a3);
  const ChebSeq<T> a3b3 = conv(a3, b3);
  const std::size_t g1 = L.row_g(0);
  const std::size_t g2 = L.row_g(1);
  const std::size_t g3 = L.row_g(2);

  add_boundary_plus_row(J, L.row_eta_b(), L.b(0), m);
  for (std::size_t j = 0; j < 3; ++j) add_ivp_linear_block(J, L.row_g(j), L.b(j), m);
  J(g2, L.gamma()) = J(g2, L.gamma()) - T(1.0);

  add_T_identity_block(J, g1, L.b(1), m, T(1.0));  // d1 = b2

  // d2 = 2 lambda a3 b3
  add_T_conv_block(J, g2, L.b(2), a3, m, T(2.0) * x.lambda);
  add_T_conv_block(J, g2, L.a(2), b3, m, T(2.0) * x.lambda);
  add_T_column(J, g2, L.lambda(), a3b3, m, T(2.0));

  // d3 = -a3^2 b2 - 2 a2 a3 b3
  add_T_conv_block(J, g3, L.b(1), a3sq, m, T(-1.0));
  add_T_conv_block(J, g3, L.b(2), a2a3, m, T(-2.0));
  add_T_conv_block(J, g3, L.a(1), a3b3, m, T(-2.0));
  add_T_conv_block(J, g3, L.a(2), conv(a3, b2) + conv(a2, b3), m, T(-2.0));
}

Eigen::VectorXd pack(const SaddleVec<double>& x);
SaddleVec<double> unpack(const Eigen::VectorXd& v, std::size_t m);
SaddleVec<Interval> to_interval(const SaddleVec<double>& x);

/// F^(m)(x): the residual restricted to modes 0..m-1.
Eigen::VectorXd projected_residual(const SaddleVec<double>& x);
/// DF^(m)(x), square of size 6m + 3.
Eigen::MatrixXd jacobian(const SaddleVec<double>& x);

/// Steady fold point plus the kernel of D_{delta,a} f_eq, scaled so the
/// normalization functional equals one.
SaddleVec<double> seed_from_fold(double lambda, const steady::SteadyVec<double>& s);

/// Newton on F^(m); throws SolverError on divergence.
SaddleVec<double> newton_saddle(const SaddleVec<double>& seed, double tol = 1e-13, int max_iter = 30);

/// Continue the steady branch at m modes, locate the fold and converge the
/// saddle-node map there.
SaddleVec<double> compute_saddle(std::size_t m, double tol = 1e-13);

/// Smallest singular value of the (delta, a) Jacobian block of f_eq at x.
double kernel_singular_value(const SaddleVec<double>& x);

/// Finite matrix of size 6m + 3 together with a diagonal tail rule on the
/// a- and b-components: the tail acts as 2n (A dagger) or 1/(2n) (A).
///
/// With `boundary_tail`, A dagger also feeds the tail modes into the boundary
/// rows (the values at y = -1 and y = +1), exactly as DF does, and A is its
/// exact inverse: the finite part of A y is A^(m) (y_F - E Lambda^-1 y_tail),
/// where E collects those boundary sums.
struct BlockOp {
  enum class Tail { derivative, inverse_derivative };
  std::size_t m = 0;
  Eigen::MatrixXd finite;
  Tail tail = Tail::derivative;
  bool boundary_tail = true;

  [[nodiscard]] double tail_factor(std::size_t n) const {
    const double d = 2.0 * static_cast<double>(n);
    return tail == Tail::derivative ? d : 1.0 / d;
  }
};

BlockOp build_A_dagger(const SaddleVec<double>& xbar);
/// Floating-point inverse of DF^(m)(x_bar); throws SolverError if singular.
BlockOp build_A(const SaddleVec<double>& xbar);

/// Boundary rows fed by the tail of sequence component c (a1, a2, a3, b1,
/// b2, b3): the value at y = -1 (weights 2 (-1)^n) and, for a1 and b1, the
/// value at y = +1 (weights 2).
struct BoundaryRows {
  std::size_t minus;
  std::optional<std::size_t> plus;
};
BoundaryRows boundary_rows(const Layout& L, std::size_t c);

/// Apply a block operator to an element of X with finitely many modes; the
/// sequence components may be longer than m (tail modes are scaled).
SaddleVec<double> apply(const BlockOp& op, const SaddleVec<double>& x);

/// Norm of X: max of |scalars| and the weighted norms of the sequences.
Interval x_norm(const SaddleVec<Interval>& x, const Weight& w);

/// Operator norm on X of a finite interval matrix in the nine-group block
/// pattern; `tail` is added to the a- and b-row groups.
Interval block_operator_norm(const DenseMatrix<Interval>& M, std::size_t m, const Weight& w, const Interval& tail);

/// ||I - A^(m) DF^(m)(x_bar)|| as a plain float (sanity check before the
/// interval pass).
double float_defect(const BlockOp& A, const SaddleVec<double>& xbar, const Weight& w);

Interval bound_Y0(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w);
Interval bound_Z0(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w);
/// Z1 from componentwise bounds psi_hat on the defect, with 1/nu on the
/// boundary rows, summed through |A^(m)|.
Interval bound_Z1_componentwise(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w);
/// Z1 from the supremum over tail modes l >= m of ||A (DF - A_dagger) e_l|| / omega_l
/// for each input component; the tail rows use the same psi_hat^inf bounds.
Interval bound_Z1(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w);
Interval bound_Z2(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w, double r_star);
/// ||A||_{B(X)}, including the 1/(2m) tail on the a- and b-rows.
Interval norm_A(const BlockOp& A, const Weight& w);

struct RadiiBounds {
  Interval Y0;
  Interval Z0;
  Interval Z1;
  Interval Z2;
  Interval Z1_componentwise;  // informational
  std::optional<double> r0;
};

/// p(r) = Z2 r^2 + (Z0 + Z1 - 1) r + Y0 evaluated in interval arithmetic.
Interval radii_polynomial(const RadiiBounds& b, double r);

struct RadiiOutcome {
  std::optional<double> r0;
  std::string failure;  // empty on success
};

/// Smallest r0 (up to a few outward nudges of the float lower root) with
/// p(r0) < 0 certified; also requires r0 <= r_star.
RadiiOutcome radii_verify(const RadiiBounds& bounds, double r_star);

struct ProofResult {
  std::size_t m = 0;
  double nu = 0.0;
  double r_star = 0.0;
  SaddleVec<double> xbar;
  double newton_residual = 0.0;
  double kernel_sigma = 0.0;
  double inverse_defect = 0.0;
  RadiiBounds bounds;
  std::string failure;
  Interval lambda_star;  // enclosure of the fold parameter
  Interval u_center;     // enclosure of U(0) at the fold
  double seconds_newton = 0.0;
  double seconds_bounds = 0.0;

  [[nodiscard]] bool proved() const { return bounds.r0.has_value(); }
};

/// Full pipeline: Newton, operators, the four bounds and the radii check.
ProofResult prove_saddle_node(std::size_t m = 65, double nu = 1.05, double r_star = 1e-6);

/// Certificate as a JSON document.
std::string certificate_json(const ProofResult& proof);

}  // namespace mems::validate

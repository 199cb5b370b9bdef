#include "mems/eigen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mems/assembly.hpp"
#include "mems/errors.hpp"
#include "mems/steady.hpp"

namespace mems::eigen {

namespace {

using Seq = ChebSeq<double>;

void check_k(int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("eigen mode k must be 1, 2 or 3");
}

// Coefficients of the phase functional acting on a4.
double phase_weight(std::size_t n, int k) {
  const double factor = n == 0 ? 1.0 : 2.0;
  if (k % 2 == 1) {
    // T_n(0) = cos(n pi / 2)
    if (n % 2 == 1) return 0.0;
    return factor * ((n / 2) % 2 == 0 ? 1.0 : -1.0);
  }
  // T_n'(0) = n sin(n pi / 2)
  if (n % 2 == 0) return 0.0;
  const double s = ((n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  return factor * s * static_cast<double>(n) * 2.0 / (static_cast<double>(k) * std::numbers::pi);
}

steady::SteadyVec<double> steady_part(const EigVec& e) {
  steady::SteadyVec<double> s;
  s.lambda = e.lambda;
  s.delta = e.delta1;
  s.a = {e.a[0], e.a[1], e.a[2]};
  return s;
}

}  // namespace

double phase(const Seq& a4, int k) {
  double v = 0.0;
  for (std::size_t n = 0; n < a4.size(); ++n) v += phase_weight(n, k) * a4[n];
  return v;
}

EigResidual f_lin(const EigVec& e) {
  const auto st = steady::f_eq(steady_part(e));
  const Seq& a3 = e.a[2];
  const Seq& a4 = e.a[3];
  const Seq a3cube = conv(conv(a3, a3), a3);
  const Seq c5 = (-2.0 * e.lambda) * conv(a3cube, a4) - e.mu * a4;
  EigResidual r;
  r.eta = {st.eta, boundary_plus(a4), phase(a4, e.k) - 1.0};
  r.g[0] = st.f[0];
  r.g[1] = st.f[1];
  r.g[2] = st.f[2];
  r.g[3] = steady::ivp_rows(a4, e.a[4], 0.0);
  r.g[4] = steady::ivp_rows(e.a[4], c5, e.delta2);
  return r;
}

EigVec seed_at_lambda0(int k, std::size_t m) {
  check_k(k);
  if (m < 2) throw std::invalid_argument("eigen truncation needs m >= 2");
  const double w = static_cast<double>(k) * std::numbers::pi / 2.0;
  EigVec e;
  e.k = k;
  e.lambda = 0.0;
  e.mu = w * w;
  e.a = {Seq(m), Seq(m), Seq(m), Seq(m), Seq(m)};
  e.a[2][0] = 1.0;
  if (k % 2 == 1) {
    e.a[3] = cheb_coefficients([w](double y) { return std::cos(w * y); }, m);
    e.a[4] = cheb_coefficients([w](double y) { return -w * std::sin(w * y); }, m);
    e.delta2 = -w * std::sin(-w);
  } else {
    e.a[3] = cheb_coefficients([w](double y) { return std::sin(w * y); }, m);
    e.a[4] = cheb_coefficients([w](double y) { return w * std::cos(w * y); }, m);
    e.delta2 = w * std::cos(-w);
  }
  return e;
}

Eigen::VectorXd pack(const EigVec& e) {
  const std::size_t m = e.modes();
  Eigen::VectorXd x(static_cast<Eigen::Index>(5 * m + 3));
  Eigen::Index i = 0;
  x(i++) = e.delta1;
  for (int j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < m; ++n) x(i++) = e.a[j].coef(n);
  }
  x(i++) = e.delta2;
  x(i++) = e.mu;
  for (int j = 3; j < 5; ++j) {
    for (std::size_t n = 0; n < m; ++n) x(i++) = e.a[j].coef(n);
  }
  return x;
}

EigVec unpack(int k, double lambda, const Eigen::VectorXd& x, std::size_t m) {
  if (static_cast<std::size_t>(x.size()) != 5 * m + 3) throw std::invalid_argument("eigen unpack: size mismatch");
  EigVec e;
  e.k = k;
  e.lambda = lambda;
  Eigen::Index i = 0;
  e.delta1 = x(i++);
  for (int j = 0; j < 3; ++j) {
    e.a[j] = Seq(m);
    for (std::size_t n = 0; n < m; ++n) e.a[j][n] = x(i++);
  }
  e.delta2 = x(i++);
  e.mu = x(i++);
  for (int j = 3; j < 5; ++j) {
    e.a[j] = Seq(m);
    for (std::size_t n = 0; n < m; ++n) e.a[j][n] = x(i++);
  }
  return e;
}

Eigen::VectorXd projected_residual(const EigVec& e) {
  const std::size_t m = e.modes();
  const auto r = f_lin(e);
  Eigen::VectorXd out(static_cast<Eigen::Index>(5 * m + 3));
  Eigen::Index i = 0;
  out(i++) = r.eta[0];
  for (int j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < m; ++n) out(i++) = r.g[j].coef(n);
  }
  out(i++) = r.eta[1];
  out(i++) = r.eta[2];
  for (int j = 3; j < 5; ++j) {
    for (std::size_t n = 0; n < m; ++n) out(i++) = r.g[j].coef(n);
  }
  return out;
}

Eigen::MatrixXd jacobian(const EigVec& e) {
  const std::size_t m = e.modes();
  const auto N = static_cast<Eigen::Index>(5 * m + 3);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N + 1);
  steady::assemble_jac_f_eq(steady_part(e), m, J, 0, 0, 1, 2);

  const std::size_t row_eta2 = 3 * m + 1;
  const std::size_t row_eta3 = row_eta2 + 1;
  const std::size_t g4 = row_eta3 + 1;
  const std::size_t g5 = g4 + m;
  const std::size_t col_a3 = 2 + 2 * m;
  const std::size_t col_delta2 = 3 * m + 2;
  const std::size_t col_mu = col_delta2 + 1;
  const std::size_t col_a4 = col_mu + 1;
  const std::size_t col_a5 = col_a4 + m;

  add_boundary_plus_row(J, row_eta2, col_a4, m);
  for (std::size_t n = 0; n < m; ++n) J(static_cast<Eigen::Index>(row_eta3), static_cast<Eigen::Index>(col_a4 + n)) = phase_weight(n, e.k);

  add_ivp_linear_block(J, g4, col_a4, m);
  add_T_identity_block(J, g4, col_a5, m, 1.0);  // c4 = a5

  add_ivp_linear_block(J, g5, col_a5, m);
  J(static_cast<Eigen::Index>(g5), static_cast<Eigen::Index>(col_delta2)) -= 1.0;
  const Seq& a3 = e.a[2];
  const Seq& a4 = e.a[3];
  const Seq a3sq = conv(a3, a3);
  const Seq a3cube = conv(a3sq, a3);
  // c5 = -2 lambda a3^3 a4 - mu a4
  add_T_conv_block(J, g5, col_a4, a3cube, m, -2.0 * e.lambda);
  add_T_identity_block(J, g5, col_a4, m, -e.mu);
  add_T_conv_block(J, g5, col_a3, conv(a3sq, a4), m, -6.0 * e.lambda);
  add_T_column(J, g5, col_mu, a4, m, -1.0);
  add_T_column(J, g5, 0, conv(a3cube, a4), m, -2.0);
  return J;
}

continuation::Problem make_problem(int k, std::size_t m) {
  check_k(k);
  continuation::Problem p;
  p.dim = 5 * m + 3;
  p.residual = [k, m](double lambda, const Eigen::VectorXd& x) { return projected_residual(unpack(k, lambda, x, m)); };
  p.jacobian = [k, m](double lambda, const Eigen::VectorXd& x) { return jacobian(unpack(k, lambda, x, m)); };
  return p;
}

EigVec newton_solve(const EigVec& e0, double tol, int max_iter) {
  const std::size_t m = e0.modes();
  continuation::Settings s;
  s.tol = tol;
  s.max_iter = max_iter;
  const auto x = continuation::newton_fixed_param(make_problem(e0.k, m), e0.lambda, pack(e0), s);
  return unpack(e0.k, e0.lambda, x, m);
}

EigenBranch compute_branch(int k, std::size_t m, double dlambda, double lambda_max,
                           const continuation::Settings& settings) {
  if (!(dlambda > 0.0)) throw std::invalid_argument("eigen branch: dlambda must be positive");
  const auto problem = make_problem(k, m);
  const EigVec seed = seed_at_lambda0(k, m);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.dim + 1));
  dir(0) = 1.0;
  // the analytic seed is accurate to rounding; polish it before continuing
  const Eigen::VectorXd x0 = continuation::newton_fixed_param(problem, 0.0, pack(seed), settings);
  const auto start = continuation::make_point(problem, 0.0, x0, dir);

  EigenBranch out;
  out.k = k;
  out.m = m;
  out.dlambda = dlambda;
  out.arc = continuation::run(problem, start, settings, 5000,
                              [](const continuation::BranchPoint& p) { return p.tangent(0) > 0.0; });
  out.arc.map_id = "eigen";
  out.arc.sizes = {{"m", m}, {"k", static_cast<std::size_t>(k)}};
  if (out.arc.points.back().tangent(0) > 0.0) throw SolverError("eigen branch: fold not reached");

  // resample on the uniform grid by Newton at fixed lambda, seeded from the
  // arclength points that bracket each grid value
  const auto& pts = out.arc.points;
  std::size_t seg = 0;
  for (std::size_t i = 0;; ++i) {
    const double lambda = static_cast<double>(i) * dlambda;
    if (lambda > lambda_max + 1e-12) break;
    while (seg + 1 < pts.size() && pts[seg + 1].tangent(0) > 0.0 && pts[seg + 1].param < lambda) ++seg;
    if (seg + 1 >= pts.size() || pts[seg + 1].param < lambda) {
      throw SolverError("eigen branch: grid value beyond the fold");
    }
    const auto& p0 = pts[seg];
    const auto& p1 = pts[seg + 1];
    const double t = (lambda - p0.param) / (p1.param - p0.param);
    const Eigen::VectorXd guess = (1.0 - t) * p0.unknowns + t * p1.unknowns;
    const auto x = continuation::newton_fixed_param(problem, lambda, guess, settings);
    out.grid.push_back(unpack(k, lambda, x, m));
  }
  return out;
}

double mu_of_lambda(int k, double lambda, std::size_t m, double tol) {
  if (lambda < 0.0) throw std::invalid_argument("mu_of_lambda: lambda must be nonnegative");
  continuation::Settings s;
  s.tol = tol;
  const auto problem = make_problem(k, m);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.dim + 1));
  dir(0) = 1.0;
  const Eigen::VectorXd x0 = continuation::newton_fixed_param(problem, 0.0, pack(seed_at_lambda0(k, m)), s);
  if (lambda == 0.0) return unpack(k, 0.0, x0, m).mu;
  const auto start = continuation::make_point(problem, 0.0, x0, dir);
  const auto arc = continuation::run(problem, start, s, 5000, [lambda](const continuation::BranchPoint& p) {
    return p.tangent(0) > 0.0 && p.param < lambda;
  });
  const auto& pts = arc.points;
  const auto& last = pts.back();
  if (!(last.param >= lambda) || pts.size() < 2) {
    throw SolverError("mu_of_lambda: lambda lies beyond the fold of the steady branch");
  }
  const auto& prev = pts[pts.size() - 2];
  const double t = (lambda - prev.param) / (last.param - prev.param);
  const Eigen::VectorXd guess = (1.0 - t) * prev.unknowns + t * last.unknowns;
  return unpack(k, lambda, continuation::newton_fixed_param(problem, lambda, guess, s), m).mu;
}

EigVec solve_mu_equals(const EigenBranch& branch, double target, const continuation::Settings& settings) {
  const auto problem = make_problem(branch.k, branch.m);
  const auto& pts = branch.arc.points;
  auto mu_minus_target = [&](const continuation::BranchPoint& p) {
    return unpack(branch.k, p.param, p.unknowns, branch.m).mu - target;
  };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double h0 = mu_minus_target(pts[i]);
    const double h1 = mu_minus_target(pts[i + 1]);
    if (h0 == 0.0) return unpack(branch.k, pts[i].param, pts[i].unknowns, branch.m);
    if (h0 * h1 > 0.0) continue;
    continuation::Settings s = settings;
    const auto p = continuation::refine_on_segment(problem, pts[i], pts[i + 1].ds, mu_minus_target, s, 1e-13);
    if (p.tangent(0) <= 0.0) break;  // root past the fold belongs to the other branch
    return unpack(branch.k, p.param, p.unknowns, branch.m);
  }
  throw SolverError("no lambda on the stable branch with mu_k(lambda) equal to the target");
}

}  // namespace mems::eigen

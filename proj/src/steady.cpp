#include "mems/steady.hpp"

#include <cmath>
#include <string>

#include "mems/errors.hpp"

namespace mems::steady {

SteadyVec<double> trivial_state(std::size_t m) {
  if (m < 2) throw std::invalid_argument("steady truncation needs m >= 2");
  SteadyVec<double> s;
  s.a = {ChebSeq<double>(m), ChebSeq<double>(m), ChebSeq<double>(m)};
  s.a[2][0] = 1.0;
  return s;
}

Eigen::VectorXd pack(const SteadyVec<double>& s) {
  const std::size_t m = s.modes();
  Eigen::VectorXd x(3 * m + 1);
  x(0) = s.delta;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < m; ++n) x(static_cast<Eigen::Index>(1 + j * m + n)) = s.a[j].coef(n);
  }
  return x;
}

SteadyVec<double> unpack(double lambda, const Eigen::VectorXd& x, std::size_t m) {
  if (static_cast<std::size_t>(x.size()) != 3 * m + 1) throw std::invalid_argument("steady unpack: size mismatch");
  SteadyVec<double> s;
  s.lambda = lambda;
  s.delta = x(0);
  for (std::size_t j = 0; j < 3; ++j) {
    s.a[j] = ChebSeq<double>(m);
    for (std::size_t n = 0; n < m; ++n) s.a[j][n] = x(static_cast<Eigen::Index>(1 + j * m + n));
  }
  return s;
}

Eigen::VectorXd projected_residual(const SteadyVec<double>& s) {
  const std::size_t m = s.modes();
  const auto r = f_eq(s);
  Eigen::VectorXd out(3 * m + 1);
  out(0) = r.eta;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < m; ++n) out(static_cast<Eigen::Index>(1 + j * m + n)) = r.f[j].coef(n);
  }
  return out;
}

Eigen::MatrixXd jac_f_eq(const SteadyVec<double>& s) {
  const std::size_t m = s.modes();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(3 * m + 1), static_cast<Eigen::Index>(3 * m + 2));
  assemble_jac_f_eq(s, m, J, 0, 0, 1, 2);
  return J;
}

SteadyVec<double> newton_solve(const SteadyVec<double>& s0, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be positive");
  const std::size_t m = s0.modes();
  const auto problem = make_problem(m);
  continuation::Settings settings;
  settings.tol = tol;
  settings.max_iter = max_iter;
  const Eigen::VectorXd x = continuation::newton_fixed_param(problem, s0.lambda, pack(s0), settings);
  return unpack(s0.lambda, x, m);
}

continuation::Problem make_problem(std::size_t m) {
  continuation::Problem p;
  p.dim = 3 * m + 1;
  p.residual = [m](double lambda, const Eigen::VectorXd& x) { return projected_residual(unpack(lambda, x, m)); };
  p.jacobian = [m](double lambda, const Eigen::VectorXd& x) { return jac_f_eq(unpack(lambda, x, m)); };
  return p;
}

continuation::Branch continue_branch(std::size_t m, const continuation::Settings& settings, std::size_t max_points,
                                     double lambda_end) {
  const auto problem = make_problem(m);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.dim + 1));
  dir(0) = 1.0;
  const auto start = continuation::make_point(problem, 0.0, pack(trivial_state(m)), dir);
  auto branch = continuation::run(problem, start, settings, max_points, [&](const continuation::BranchPoint& p) {
    if (p.tangent(0) < 0.0 && p.param <= lambda_end) return false;
    // stay clear of touchdown where the truncation stops resolving U
    return eval(unpack(p.param, p.unknowns, m).a[0], 0.0) > -0.9;
  });
  branch.map_id = "steady";
  branch.sizes = {{"m", m}};
  return branch;
}

}  // namespace mems::steady

#pragma once

// Steady state coupled with an eigenpair of its linearization:
//   U'' = lambda / (1 + U)^2,   V'' = -2 lambda V / (1 + U)^3 - mu V,
// U(+-1) = V(+-1) = 0, plus a phase condition fixing the scale of V.
// Components u1..u5 = (U, U', 1/(1+U), V, V').

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <vector>

#include "mems/continuation.hpp"
#include "mems/seqspace.hpp"

namespace mems::eigen {

struct EigVec {
  int k = 1;  // mode index; selects the phase functional
  double lambda = 0.0;
  double delta1 = 0.0;  // U'(-1)
  double delta2 = 0.0;  // V'(-1)
  double mu = 0.0;
  std::array<ChebSeq<double>, 5> a;

  [[nodiscard]] std::size_t modes() const { return a[0].size(); }
};

struct EigResidual {
  std::array<double, 3> eta{};
  std::array<ChebSeq<double>, 5> g;
};

/// Phase functional: V(0) for odd k, V'(0) * 2 / (k pi) for even k.
double phase(const ChebSeq<double>& a4, int k);

/// Full residual of the coupled map.
EigResidual f_lin(const EigVec& e);

/// Exact data at lambda = 0 for k in {1, 2, 3}.
EigVec seed_at_lambda0(int k, std::size_t m);

/// Unknown layout (delta1, a1, a2, a3, delta2, mu, a4, a5), length 5m + 3.
Eigen::VectorXd pack(const EigVec& e);
EigVec unpack(int k, double lambda, const Eigen::VectorXd& x, std::size_t m);

/// Residual rows (eta1, g1, g2, g3, eta2, eta3, g4, g5) truncated to m modes.
Eigen::VectorXd projected_residual(const EigVec& e);

/// (5m+3) x (5m+4) Jacobian; column 0 is d/d lambda.
Eigen::MatrixXd jacobian(const EigVec& e);

continuation::Problem make_problem(int k, std::size_t m);

/// Newton at fixed lambda; throws SolverError.
EigVec newton_solve(const EigVec& e0, double tol = 1e-12, int max_iter = 30);

struct EigenBranch {
  int k = 1;
  std::size_t m = 0;
  double dlambda = 0.0;
  continuation::Branch arc;  // pseudo-arclength run from lambda = 0 past the fold
  std::vector<EigVec> grid;  // solutions at lambda = i * dlambda
};

/// Continue from the lambda = 0 seed past the fold, then resample on the
/// uniform grid 0, dlambda, ... <= lambda_max.
EigenBranch compute_branch(int k, std::size_t m, double dlambda = 0.005, double lambda_max = 0.345,
                           const continuation::Settings& settings = {});

/// mu_k(lambda) on the stable branch, 0 <= lambda < fold.
double mu_of_lambda(int k, double lambda, std::size_t m = 65, double tol = 1e-12);

/// First point on the stable part of the branch with mu = target; throws
/// SolverError if mu - target does not change sign before the fold.
EigVec solve_mu_equals(const EigenBranch& branch, double target, const continuation::Settings& settings = {});

}  // namespace mems::eigen

#pragma once

// Pseudo-arclength continuation in the extended space (lambda, x) for maps
// F(lambda, x) : R x R^n -> R^n.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mems::continuation {

struct Settings {
  double ds = 1e-3;
  double ds_min = 1e-8;
  double ds_max = 5e-2;
  double tol = 1e-12;
  int max_iter = 20;
  double growth = 1.5;
  int easy_iterations = 3;  // grow ds when the corrector needs at most this many steps
  double min_tangent_dot = 0.9;  // reject steps that turn the tangent too sharply
};

struct Problem {
  std::size_t dim = 0;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> residual;
  // dim x (dim + 1); column 0 is the derivative with respect to lambda.
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> jacobian;
};

struct BranchPoint {
  double param = 0.0;
  Eigen::VectorXd unknowns;
  double residual_norm = 0.0;
  Eigen::VectorXd tangent;  // unit vector (d lambda, d x)
  int iterations = 0;
  double ds = 0.0;  // arclength step that produced this point
};

struct StepRecord {
  double ds = 0.0;
  bool accepted = false;
  int iterations = 0;
};

struct Branch {
  std::string map_id;
  std::vector<std::pair<std::string, std::size_t>> sizes;
  std::vector<BranchPoint> points;
  std::vector<StepRecord> history;
  int halvings = 0;
  std::string stop_reason;
};

struct FoldPoint {
  double param = 0.0;
  Eigen::VectorXd unknowns;
  Eigen::VectorXd tangent;
  std::size_t after_index = 0;  // fold lies between points[after_index] and the next one
};

/// Max-norm of the residual.
double residual_norm(const Problem& problem, double lambda, const Eigen::VectorXd& x);

/// Unit null vector of the dim x (dim+1) Jacobian, oriented along `previous`.
Eigen::VectorXd tangent(const Eigen::MatrixXd& jac, const Eigen::VectorXd& previous);

/// Newton in x with lambda frozen; throws SolverError on failure.
Eigen::VectorXd newton_fixed_param(const Problem& problem, double lambda, Eigen::VectorXd x,
                                   const Settings& settings, int* iterations = nullptr);

/// Converged point with its tangent, oriented along `direction` (extended space).
BranchPoint make_point(const Problem& problem, double lambda, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& direction);

/// Pseudo-arclength corrector from an explicit predictor and hyperplane normal.
/// Returns nothing if Newton fails.
std::optional<BranchPoint> correct(const Problem& problem, double lambda_pred, const Eigen::VectorXd& x_pred,
                                   const Eigen::VectorXd& normal, const Settings& settings);

/// One predictor-corrector step of length ds; throws SolverError if the
/// corrector does not converge.
BranchPoint arclength_step(const Problem& problem, const BranchPoint& from, double ds, const Settings& settings);

/// Step-controlled continuation. `keep_going` is consulted after each
/// accepted point; the run also ends after `max_points` points or when ds
/// falls below ds_min.
Branch run(const Problem& problem, const BranchPoint& start, const Settings& settings, std::size_t max_points,
           const std::function<bool(const BranchPoint&)>& keep_going = {});

/// Point on the branch segment that starts at `from` (arclength s in
/// [0, s_end]) where the scalar functional `fn` vanishes. `fn` must change
/// sign between s = 0 and s = s_end. Illinois iteration; stops once
/// |fn| <= ftol or the bracket collapses.
BranchPoint refine_on_segment(const Problem& problem, const BranchPoint& from, double s_end,
                              const std::function<double(const BranchPoint&)>& fn, const Settings& settings,
                              double ftol = 1e-14);

/// First sign change of the lambda-component of the tangent, refined by a
/// secant search on the arclength from the bracketing point.
std::optional<FoldPoint> detect_fold(const Problem& problem, const Branch& branch, const Settings& settings);

}  // namespace mems::continuation

#include "mems/continuation.hpp"

#include <cmath>
#include <string>

#include "mems/errors.hpp"

namespace mems::continuation {

namespace {

Eigen::VectorXd extended(double lambda, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(x.size() + 1);
  y(0) = lambda;
  y.tail(x.size()) = x;
  return y;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

double residual_norm(const Problem& problem, double lambda, const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = problem.residual(lambda, x);
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

Eigen::VectorXd tangent(const Eigen::MatrixXd& jac, const Eigen::VectorXd& previous) {
  const auto n = jac.rows();
  if (jac.cols() != n + 1 || previous.size() != n + 1) {
    throw SolverError("tangent: Jacobian must be n x (n+1) and match the previous tangent");
  }
  Eigen::MatrixXd bordered(n + 1, n + 1);
  bordered.topRows(n) = jac;
  bordered.row(n) = previous.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd t = bordered.partialPivLu().solve(rhs);
  const double len = t.norm();
  if (!std::isfinite(len) || len == 0.0) throw SolverError("tangent: singular bordered system");
  return t / len;
}

Eigen::VectorXd newton_fixed_param(const Problem& problem, double lambda, Eigen::VectorXd x,
                                   const Settings& settings, int* iterations) {
  for (int it = 0; it <= settings.max_iter; ++it) {
    const Eigen::VectorXd r = problem.residual(lambda, x);
    const double rn = r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
    if (!std::isfinite(rn)) break;
    if (rn <= settings.tol) {
      if (iterations != nullptr) *iterations = it;
      return x;
    }
    if (it == settings.max_iter) break;
    const Eigen::MatrixXd jac = problem.jacobian(lambda, x);
    const Eigen::VectorXd dx = jac.rightCols(static_cast<Eigen::Index>(problem.dim)).partialPivLu().solve(-r);
    if (!finite(dx)) break;
    x += dx;
  }
  throw SolverError("Newton at fixed parameter did not converge (lambda = " + std::to_string(lambda) + ")");
}

BranchPoint make_point(const Problem& problem, double lambda, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& direction) {
  BranchPoint p;
  p.param = lambda;
  p.unknowns = x;
  p.residual_norm = residual_norm(problem, lambda, x);
  p.tangent = tangent(problem.jacobian(lambda, x), direction);
  return p;
}

std::optional<BranchPoint> correct(const Problem& problem, double lambda_pred, const Eigen::VectorXd& x_pred,
                                   const Eigen::VectorXd& normal, const Settings& settings) {
  const Eigen::VectorXd y_pred = extended(lambda_pred, x_pred);
  Eigen::VectorXd y = y_pred;
  const auto n = static_cast<Eigen::Index>(problem.dim);
  for (int it = 0; it <= settings.max_iter; ++it) {
    const double lambda = y(0);
    const Eigen::VectorXd x = y.tail(n);
    const Eigen::VectorXd r = problem.residual(lambda, x);
    const double h = normal.dot(y - y_pred);
    const double rn = r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
    if (!std::isfinite(rn) || !std::isfinite(h)) return std::nullopt;
    if (rn <= settings.tol && std::abs(h) <= settings.tol) {
      BranchPoint p;
      p.param = lambda;
      p.unknowns = x;
      p.residual_norm = rn;
      const Eigen::MatrixXd jac = problem.jacobian(lambda, x);
      try {
        p.tangent = tangent(jac, normal);
      } catch (const SolverError&) {
        return std::nullopt;
      }
      p.iterations = it;
      return p;
    }
    if (it == settings.max_iter) break;
    Eigen::MatrixXd bordered(n + 1, n + 1);
    bordered.topRows(n) = problem.jacobian(lambda, x);
    bordered.row(n) = normal.transpose();
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -r;
    rhs(n) = -h;
    const Eigen::VectorXd dy = bordered.partialPivLu().solve(rhs);
    if (!finite(dy)) return std::nullopt;
    y += dy;
  }
  return std::nullopt;
}

BranchPoint arclength_step(const Problem& problem, const BranchPoint& from, double ds, const Settings& settings) {
  if (ds == 0.0) throw SolverError("arclength step of length zero");
  const auto n = static_cast<Eigen::Index>(problem.dim);
  const double lambda_pred = from.param + ds * from.tangent(0);
  const Eigen::VectorXd x_pred = from.unknowns + ds * from.tangent.tail(n);
  auto p = correct(problem, lambda_pred, x_pred, from.tangent, settings);
  if (!p) throw SolverError("pseudo-arclength corrector did not converge");
  p->ds = ds;
  return *p;
}

Branch run(const Problem& problem, const BranchPoint& start, const Settings& settings, std::size_t max_points,
           const std::function<bool(const BranchPoint&)>& keep_going) {
  Branch branch;
  branch.points.push_back(start);
  double ds = settings.ds;
  while (branch.points.size() < max_points) {
    const BranchPoint& last = branch.points.back();
    std::optional<BranchPoint> next;
    try {
      next = arclength_step(problem, last, ds, settings);
    } catch (const SolverError&) {
      next.reset();
    }
    if (next && next->tangent.dot(last.tangent) < settings.min_tangent_dot) next.reset();
    branch.history.push_back({ds, next.has_value(), next ? next->iterations : settings.max_iter});
    if (!next) {
      ds *= 0.5;
      ++branch.halvings;
      if (std::abs(ds) < settings.ds_min) {
        branch.stop_reason = "step size fell below ds_min";
        return branch;
      }
      continue;
    }
    branch.points.push_back(*next);
    if (next->iterations <= settings.easy_iterations) {
      ds = std::copysign(std::min(std::abs(ds) * settings.growth, settings.ds_max), ds);
    }
    if (keep_going && !keep_going(branch.points.back())) {
      branch.stop_reason = "stop condition reached";
      return branch;
    }
  }
  branch.stop_reason = "point budget reached";
  return branch;
}

BranchPoint refine_on_segment(const Problem& problem, const BranchPoint& from, double s_end,
                              const std::function<double(const BranchPoint&)>& fn, const Settings& settings,
                              double ftol) {
  double s_lo = 0.0;
  double h_lo = fn(from);
  BranchPoint hi_point = arclength_step(problem, from, s_end, settings);
  double s_hi = s_end;
  double h_hi = fn(hi_point);
  if (!(h_lo * h_hi <= 0.0)) throw SolverError("refine_on_segment: functional does not change sign");
  BranchPoint best = std::abs(h_lo) <= std::abs(h_hi) ? from : hi_point;
  double h_best = std::min(std::abs(h_lo), std::abs(h_hi));
  int side = 0;
  for (int it = 0; it < 200 && h_best > ftol; ++it) {
    if (std::abs(s_hi - s_lo) <= 1e-15 * std::max(1.0, std::abs(s_end))) break;
    const double s = s_hi - h_hi * (s_hi - s_lo) / (h_hi - h_lo);
    BranchPoint p = s == 0.0 ? from : arclength_step(problem, from, s, settings);
    const double h = fn(p);
    if (std::abs(h) < h_best) {
      best = p;
      h_best = std::abs(h);
    }
    if ((h < 0.0) == (h_hi < 0.0)) {
      s_hi = s;
      h_hi = h;
      if (side == 1) h_lo *= 0.5;
      side = 1;
    } else {
      s_lo = s;
      h_lo = h;
      if (side == -1) h_hi *= 0.5;
      side = -1;
    }
  }
  return best;
}

std::optional<FoldPoint> detect_fold(const Problem& problem, const Branch& branch, const Settings& settings) {
  for (std::size_t i = 0; i + 1 < branch.points.size(); ++i) {
    const BranchPoint& a = branch.points[i];
    const BranchPoint& b = branch.points[i + 1];
    if (!(a.tangent(0) * b.tangent(0) < 0.0)) continue;
    const BranchPoint best = refine_on_segment(
        problem, a, b.ds, [](const BranchPoint& p) { return p.tangent(0); }, settings);
    FoldPoint f;
    f.param = best.param;
    f.unknowns = best.unknowns;
    f.tangent = best.tangent;
    f.after_index = i;
    return f;
  }
  return std::nullopt;
}

}  // namespace mems::continuation

#include "mems/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "mems/errors.hpp"
#include "mems/steady.hpp"

namespace mems::periodic {

namespace {

using Seq = ChebSeq<double>;
using Index = Eigen::Index;

double boundary_weight_minus(std::size_t l) { return l == 0 ? 1.0 : (l % 2 == 0 ? 2.0 : -2.0); }
double boundary_weight_plus(std::size_t l) { return l == 0 ? 1.0 : 2.0; }

// Sum of alpha over the distinct sign choices (+-l, +-j) of the input index:
// the (i, k; l, j) entry of h -> alpha * h for h even in both indices.
double conv2_entry(const FourierChebGrid& alpha, std::ptrdiff_t i, std::ptrdiff_t k, std::ptrdiff_t l,
                   std::ptrdiff_t j) {
  double v = alpha.sym(i - l, k - j);
  if (l != 0) v += alpha.sym(i + l, k - j);
  if (j != 0) v += alpha.sym(i - l, k + j);
  if (l != 0 && j != 0) v += alpha.sym(i + l, k + j);
  return v;
}

struct Layout {
  std::size_t m;
  std::size_t K;
  [[nodiscard]] std::size_t grid() const { return m * K; }
  [[nodiscard]] std::size_t dim() const { return K + 3 * grid(); }
  [[nodiscard]] Index col_delta(std::size_t k) const { return static_cast<Index>(1 + k); }
  [[nodiscard]] Index col_a(std::size_t j, std::size_t n, std::size_t k) const {
    return static_cast<Index>(1 + K + j * grid() + n * K + k);
  }
  [[nodiscard]] Index row_eta(std::size_t k) const { return static_cast<Index>(k); }
  [[nodiscard]] Index row_g(std::size_t j, std::size_t n, std::size_t k) const {
    return static_cast<Index>(K + j * grid() + n * K + k);
  }
};

// J(rows of component jr) += scale * T M2(alpha) acting on variable block jc.
void add_T_conv2(Eigen::MatrixXd& J, const Layout& L, std::size_t jr, std::size_t jc, const FourierChebGrid& alpha,
                 double scale) {
  for (std::size_t n = 1; n < L.m; ++n) {
    for (std::size_t k = 0; k < L.K; ++k) {
      const Index row = L.row_g(jr, n, k);
      const auto np = static_cast<std::ptrdiff_t>(n + 1);
      const auto nm = static_cast<std::ptrdiff_t>(n - 1);
      const auto kk = static_cast<std::ptrdiff_t>(k);
      for (std::size_t l = 0; l < L.m; ++l) {
        for (std::size_t j = 0; j < L.K; ++j) {
          const auto ll = static_cast<std::ptrdiff_t>(l);
          const auto jj = static_cast<std::ptrdiff_t>(j);
          const double v = conv2_entry(alpha, np, kk, ll, jj) - conv2_entry(alpha, nm, kk, ll, jj);
          if (v != 0.0) J(row, L.col_a(jc, l, j)) += scale * v;
        }
      }
    }
  }
}

// J(rows of jr) += T applied to a diagonal map with weights w(k) on block jc.
void add_T_diag(Eigen::MatrixXd& J, const Layout& L, std::size_t jr, std::size_t jc,
                const std::function<double(std::size_t)>& w) {
  for (std::size_t n = 1; n < L.m; ++n) {
    for (std::size_t k = 0; k < L.K; ++k) {
      const double s = w(k);
      if (s == 0.0) continue;
      if (n + 1 < L.m) J(L.row_g(jr, n, k), L.col_a(jc, n + 1, k)) += s;
      J(L.row_g(jr, n, k), L.col_a(jc, n - 1, k)) -= s;
    }
  }
}

FourierChebGrid ivp_rows2(const FourierChebGrid& a, const FourierChebGrid& c, const std::vector<double>& initial) {
  const std::size_t m = std::max(a.cheb_modes(), c.cheb_modes() + 1);
  const std::size_t K = std::max(a.fourier_modes(), c.fourier_modes());
  FourierChebGrid r(m, K);
  for (std::size_t k = 0; k < K; ++k) {
    double b = 0.0;
    for (std::size_t l = 0; l < a.cheb_modes() && k < a.fourier_modes(); ++l) b += boundary_weight_minus(l) * a(l, k);
    r(0, k) = b - (k < initial.size() ? initial[k] : 0.0);
    for (std::size_t n = 1; n < m; ++n) {
      const auto nn = static_cast<std::ptrdiff_t>(n);
      const auto kk = static_cast<std::ptrdiff_t>(k);
      r(n, k) = 2.0 * static_cast<double>(n) * a.sym(nn, kk) + c.sym(nn + 1, kk) - c.sym(nn - 1, kk);
    }
  }
  return r;
}

// Values s_k(y) of every Fourier column at the given points.
std::vector<std::vector<double>> column_values(const FourierChebGrid& a, const std::vector<double>& ys) {
  std::vector<std::vector<double>> s(a.fourier_modes(), std::vector<double>(ys.size()));
  for (std::size_t k = 0; k < a.fourier_modes(); ++k) {
    const Seq col = a.column(k);
    for (std::size_t i = 0; i < ys.size(); ++i) s[k][i] = mems::eval(col, ys[i]);
  }
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace

Seq FourierChebGrid::column(std::size_t k) const {
  Seq c(m_);
  for (std::size_t n = 0; n < m_; ++n) c[n] = (*this)(n, k);
  return c;
}

void FourierChebGrid::set_column(std::size_t k, const Seq& a) {
  for (std::size_t n = 0; n < m_; ++n) (*this)(n, k) = a.coef(n);
}

FourierChebGrid FourierChebGrid::resized(std::size_t m, std::size_t K) const {
  FourierChebGrid r(m, K);
  for (std::size_t n = 0; n < std::min(m, m_); ++n) {
    for (std::size_t k = 0; k < std::min(K, K_); ++k) r(n, k) = (*this)(n, k);
  }
  return r;
}

FourierChebGrid operator+(const FourierChebGrid& a, const FourierChebGrid& b) {
  FourierChebGrid r(std::max(a.cheb_modes(), b.cheb_modes()), std::max(a.fourier_modes(), b.fourier_modes()));
  for (std::size_t n = 0; n < r.cheb_modes(); ++n) {
    for (std::size_t k = 0; k < r.fourier_modes(); ++k) {
      const auto nn = static_cast<std::ptrdiff_t>(n);
      const auto kk = static_cast<std::ptrdiff_t>(k);
      r(n, k) = a.sym(nn, kk) + b.sym(nn, kk);
    }
  }
  return r;
}

FourierChebGrid operator*(double s, const FourierChebGrid& a) {
  FourierChebGrid r(a.cheb_modes(), a.fourier_modes());
  for (std::size_t n = 0; n < a.cheb_modes(); ++n) {
    for (std::size_t k = 0; k < a.fourier_modes(); ++k) r(n, k) = s * a(n, k);
  }
  return r;
}

FourierChebGrid conv2(const FourierChebGrid& a, const FourierChebGrid& b) {
  if (a.cheb_modes() == 0 || a.fourier_modes() == 0 || b.cheb_modes() == 0 || b.fourier_modes() == 0) return {};
  const auto ma = static_cast<std::ptrdiff_t>(a.cheb_modes());
  const auto mb = static_cast<std::ptrdiff_t>(b.cheb_modes());
  const auto Ka = static_cast<std::ptrdiff_t>(a.fourier_modes());
  const auto Kb = static_cast<std::ptrdiff_t>(b.fourier_modes());
  FourierChebGrid c(static_cast<std::size_t>(ma + mb - 1), static_cast<std::size_t>(Ka + Kb - 1));
  for (std::ptrdiff_t n = 0; n < ma + mb - 1; ++n) {
    const std::ptrdiff_t n_lo = std::max(-(ma - 1), n - (mb - 1));
    const std::ptrdiff_t n_hi = std::min(ma - 1, n + (mb - 1));
    for (std::ptrdiff_t k = 0; k < Ka + Kb - 1; ++k) {
      const std::ptrdiff_t k_lo = std::max(-(Ka - 1), k - (Kb - 1));
      const std::ptrdiff_t k_hi = std::min(Ka - 1, k + (Kb - 1));
      double s = 0.0;
      for (std::ptrdiff_t n1 = n_lo; n1 <= n_hi; ++n1) {
        for (std::ptrdiff_t k1 = k_lo; k1 <= k_hi; ++k1) s += a.sym(n1, k1) * b.sym(n - n1, k - k1);
      }
      c(static_cast<std::size_t>(n), static_cast<std::size_t>(k)) = s;
    }
  }
  return c;
}

double eval(const FourierChebGrid& a, double t, double y) {
  double u = 0.0;
  for (std::size_t k = 0; k < a.fourier_modes(); ++k) {
    const double s = mems::eval(a.column(k), y);
    u += k == 0 ? s : 2.0 * s * std::cos(static_cast<double>(k) * t);
  }
  return u;
}

PeriodicResidual f_per(const PeriodicVec& P) {
  const std::size_t K = P.fourier_modes();
  const FourierChebGrid a3sq = conv2(P.a[2], P.a[2]);
  FourierChebGrid c2 = P.lambda * a3sq;
  const double w2 = P.omega * P.omega;
  for (std::size_t n = 0; n < P.cheb_modes(); ++n) {
    for (std::size_t k = 1; k < K; ++k) c2(n, k) -= w2 * static_cast<double>(k * k) * P.a[0](n, k);
  }
  const FourierChebGrid c3 = -1.0 * conv2(P.a[1], a3sq);
  std::vector<double> unit(K, 0.0);
  if (K > 0) unit[0] = 1.0;

  PeriodicResidual r;
  r.eta.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    double s = 0.0;
    for (std::size_t n = 0; n < P.cheb_modes(); ++n) s += boundary_weight_plus(n) * P.a[0](n, k);
    r.eta[k] = s;
  }
  r.g[0] = ivp_rows2(P.a[0], P.a[1], std::vector<double>(K, 0.0));
  r.g[1] = ivp_rows2(P.a[1], c2, P.delta);
  r.g[2] = ivp_rows2(P.a[2], c3, unit);
  return r;
}

Eigen::VectorXd pack(const PeriodicVec& P) {
  const Layout L{P.cheb_modes(), P.fourier_modes()};
  Eigen::VectorXd x(static_cast<Index>(L.dim()));
  for (std::size_t k = 0; k < L.K; ++k) x(L.col_delta(k) - 1) = k < P.delta.size() ? P.delta[k] : 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < L.m; ++n) {
      for (std::size_t k = 0; k < L.K; ++k) x(L.col_a(j, n, k) - 1) = P.a[j](n, k);
    }
  }
  return x;
}

PeriodicVec unpack(double lambda, double omega, const Eigen::VectorXd& x, std::size_t m, std::size_t K) {
  const Layout L{m, K};
  if (static_cast<std::size_t>(x.size()) != L.dim()) throw std::invalid_argument("periodic unpack: size mismatch");
  PeriodicVec P;
  P.lambda = lambda;
  P.omega = omega;
  P.delta.resize(K);
  for (std::size_t k = 0; k < K; ++k) P.delta[k] = x(L.col_delta(k) - 1);
  for (std::size_t j = 0; j < 3; ++j) {
    P.a[j] = FourierChebGrid(m, K);
    for (std::size_t n = 0; n < m; ++n) {
      for (std::size_t k = 0; k < K; ++k) P.a[j](n, k) = x(L.col_a(j, n, k) - 1);
    }
  }
  return P;
}

Eigen::VectorXd projected_residual(const PeriodicVec& P) {
  const Layout L{P.cheb_modes(), P.fourier_modes()};
  const auto r = f_per(P);
  Eigen::VectorXd out(static_cast<Index>(L.dim()));
  for (std::size_t k = 0; k < L.K; ++k) out(L.row_eta(k)) = r.eta[k];
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < L.m; ++n) {
      for (std::size_t k = 0; k < L.K; ++k) out(L.row_g(j, n, k)) = r.g[j](n, k);
    }
  }
  return out;
}

Eigen::MatrixXd jacobian(const PeriodicVec& P) {
  const Layout L{P.cheb_modes(), P.fourier_modes()};
  const auto N = static_cast<Index>(L.dim());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N + 1);

  for (std::size_t k = 0; k < L.K; ++k) {
    for (std::size_t l = 0; l < L.m; ++l) J(L.row_eta(k), L.col_a(0, l, k)) = boundary_weight_plus(l);
  }
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < L.K; ++k) {
      for (std::size_t l = 0; l < L.m; ++l) J(L.row_g(j, 0, k), L.col_a(j, l, k)) += boundary_weight_minus(l);
      for (std::size_t n = 1; n < L.m; ++n) J(L.row_g(j, n, k), L.col_a(j, n, k)) += 2.0 * static_cast<double>(n);
    }
  }
  for (std::size_t k = 0; k < L.K; ++k) J(L.row_g(1, 0, k), L.col_delta(k)) -= 1.0;

  const FourierChebGrid a3sq = conv2(P.a[2], P.a[2]);
  const FourierChebGrid a2a3 = conv2(P.a[1], P.a[2]);
  const double w2 = P.omega * P.omega;

  add_T_diag(J, L, 0, 1, [](std::size_t) { return 1.0; });  // c1 = a2
  add_T_conv2(J, L, 1, 2, P.a[2], 2.0 * P.lambda);           // c2 = lambda a3^2 - omega^2 k^2 a1
  add_T_diag(J, L, 1, 0, [w2](std::size_t k) { return -w2 * static_cast<double>(k * k); });
  for (std::size_t n = 1; n < L.m; ++n) {
    for (std::size_t k = 0; k < L.K; ++k) {
      const auto nn = static_cast<std::ptrdiff_t>(n);
      const auto kk = static_cast<std::ptrdiff_t>(k);
      J(L.row_g(1, n, k), 0) += a3sq.sym(nn + 1, kk) - a3sq.sym(nn - 1, kk);
    }
  }
  add_T_conv2(J, L, 2, 1, a3sq, -1.0);  // c3 = -a2 a3^2
  add_T_conv2(J, L, 2, 2, a2a3, -2.0);
  return J;
}

continuation::Problem make_problem(double omega, std::size_t m, std::size_t K) {
  if (m < 2 || K < 1) throw std::invalid_argument("periodic truncation needs m >= 2 and K >= 1");
  continuation::Problem p;
  p.dim = K * (3 * m + 1);
  p.residual = [omega, m, K](double lambda, const Eigen::VectorXd& x) {
    return projected_residual(unpack(lambda, omega, x, m, K));
  };
  p.jacobian = [omega, m, K](double lambda, const Eigen::VectorXd& x) {
    return jacobian(unpack(lambda, omega, x, m, K));
  };
  return p;
}

PeriodicVec embed_steady(double lambda, double delta, const std::array<Seq, 3>& a, double omega, std::size_t m,
                         std::size_t K) {
  PeriodicVec P;
  P.lambda = lambda;
  P.omega = omega;
  P.delta.assign(K, 0.0);
  P.delta[0] = delta;
  for (std::size_t j = 0; j < 3; ++j) {
    P.a[j] = FourierChebGrid(m, K);
    P.a[j].set_column(0, a[j].resized(m));
  }
  return P;
}

double frequency(int p, int q) {
  if (p <= 0 || q <= 0) throw std::invalid_argument("frequency needs positive p and q");
  return std::numbers::pi * static_cast<double>(p) / (2.0 * static_cast<double>(q));
}

PeriodicVec predictor(int k, int p, int q, double b, const eigen::EigenBranch& eig_branch, std::size_t m,
                      std::size_t K) {
  if (eig_branch.k != k) throw std::invalid_argument("predictor: eigen branch has a different mode index");
  if (K < 2) throw std::invalid_argument("predictor needs at least two Fourier modes");
  if (std::gcd(p, q) != 1) throw std::invalid_argument("predictor: p and q must be relatively prime");
  const double omega = frequency(p, q);
  const eigen::EigVec e = eigen::solve_mu_equals(eig_branch, omega * omega);
  PeriodicVec P = embed_steady(e.lambda, e.delta1, {e.a[0], e.a[1], e.a[2]}, omega, m, K);
  // a cos(t) profile f(y) sits in the k = 1 column as f / 2
  const double h = 0.5 * b;
  const Seq u3_perturbation = -1.0 * conv(e.a[3], conv(e.a[2], e.a[2]));
  P.a[0].set_column(1, (h * e.a[3]).resized(m));
  P.a[1].set_column(1, (h * e.a[4]).resized(m));
  P.a[2].set_column(1, (h * u3_perturbation).resized(m));
  P.delta[1] = h * e.delta2;
  return P;
}

PeriodicBranch continue_branch(const PeriodicVec& seed, const PeriodicVec& steady_base, std::size_t steps, double ds,
                               const continuation::Settings& settings,
                               const std::function<bool(const PeriodicVec&)>& keep_going) {
  const std::size_t m = seed.cheb_modes();
  const std::size_t K = seed.fourier_modes();
  const auto problem = make_problem(seed.omega, m, K);

  const Eigen::VectorXd perturbation = pack(seed) - pack(steady_base);
  if (perturbation.norm() == 0.0) throw SolverError("continue_branch: seed carries no perturbation");
  Eigen::VectorXd normal = Eigen::VectorXd::Zero(static_cast<Index>(problem.dim + 1));
  normal.tail(static_cast<Index>(problem.dim)) = perturbation / perturbation.norm();

  const auto first = continuation::correct(problem, seed.lambda, pack(seed), normal, settings);
  if (!first) throw SolverError("continue_branch: predictor could not be corrected");
  const auto start = continuation::make_point(problem, first->param, first->unknowns, normal);

  continuation::Settings s = settings;
  s.ds = ds;
  PeriodicBranch out;
  out.omega = seed.omega;
  out.m = m;
  out.K = K;
  out.arc = continuation::run(problem, start, s, steps, [&](const continuation::BranchPoint& p) {
    const PeriodicVec P = unpack(p.param, seed.omega, p.unknowns, m, K);
    if (sample_extremes(P).min <= -1.0) return false;
    return !keep_going || keep_going(P);
  });
  out.arc.map_id = "periodic";
  out.arc.sizes = {{"m", m}, {"K", K}};
  return out;
}

PeriodicBranch compute_branch(int k, int p, int q, std::size_t m, std::size_t K, const eigen::EigenBranch& eig_branch,
                              double b, std::size_t steps, const continuation::Settings& settings,
                              const std::function<bool(const PeriodicVec&)>& keep_going) {
  const PeriodicVec seed = predictor(k, p, q, b, eig_branch, m, K);
  PeriodicVec base = seed;
  for (auto& a : base.a) {
    for (std::size_t n = 0; n < m; ++n) {
      for (std::size_t kk = 1; kk < K; ++kk) a(n, kk) = 0.0;
    }
  }
  std::fill(base.delta.begin() + 1, base.delta.end(), 0.0);
  PeriodicBranch out = continue_branch(seed, base, steps, settings.ds, settings, keep_going);
  out.k = k;
  out.p = p;
  out.q = q;
  out.lambda0 = seed.lambda;
  return out;
}

Extremes sample_extremes(const PeriodicVec& P) {
  std::vector<double> ys(65);
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = -1.0 + static_cast<double>(i) / 32.0;
  const auto s = column_values(P.a[0], ys);
  Extremes e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int jt = 0; jt <= 32; ++jt) {
    const double t = std::numbers::pi * jt / 32.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      double u = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        u += k == 0 ? s[k][i] : 2.0 * s[k][i] * std::cos(static_cast<double>(k) * t);
      }
      e.min = std::min(e.min, u);
      e.max = std::max(e.max, u);
    }
  }
  return e;
}

double tail_ratio(const PeriodicVec& P) {
  double top = 0.0;
  double tail = 0.0;
  const std::size_t m = P.cheb_modes();
  const std::size_t K = P.fourier_modes();
  for (const auto& a : P.a) {
    for (std::size_t n = 0; n < m; ++n) {
      for (std::size_t k = 0; k < K; ++k) {
        const double v = std::abs(a(n, k));
        top = std::max(top, v);
        if (n + 1 == m || k + 1 == K) tail = std::max(tail, v);
      }
    }
  }
  return top == 0.0 ? 0.0 : tail / top;
}

void write_branch_csv(const PeriodicBranch& branch, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "lambda,omega,p,q,sup_norm,u_center\n";
  for (const auto& pt : branch.arc.points) {
    const PeriodicVec P = unpack(pt.param, branch.omega, pt.unknowns, branch.m, branch.K);
    const Extremes e = sample_extremes(P);
    const double sup = std::max(std::abs(e.min), std::abs(e.max));
    out << format_double(pt.param) << ',' << format_double(branch.omega) << ',' << branch.p << ',' << branch.q << ','
        << format_double(sup) << ',' << format_double(eval(P.a[0], 0.0, 0.0)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_branch_json(const PeriodicBranch& branch, const std::filesystem::path& path, std::size_t sample_every) {
  nlohmann::json j;
  j["k"] = branch.k;
  j["p"] = branch.p;
  j["q"] = branch.q;
  j["omega"] = branch.omega;
  j["lambda0"] = branch.lambda0;
  j["m"] = branch.m;
  j["K"] = branch.K;
  j["layout"] = "a[j][n][k] multiplies m_{n,k} T_n(y) cos(k t)";
  j["points"] = nlohmann::json::array();
  const auto& pts = branch.arc.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (sample_every == 0 || (i % sample_every != 0 && i + 1 != pts.size())) continue;
    const PeriodicVec P = unpack(pts[i].param, branch.omega, pts[i].unknowns, branch.m, branch.K);
    nlohmann::json pj;
    pj["index"] = i;
    pj["lambda"] = pts[i].param;
    pj["residual_norm"] = pts[i].residual_norm;
    pj["delta"] = P.delta;
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<std::vector<double>> rows(branch.m, std::vector<double>(branch.K));
      for (std::size_t n = 0; n < branch.m; ++n) {
        for (std::size_t k = 0; k < branch.K; ++k) rows[n][k] = P.a[c](n, k);
      }
      pj["a" + std::to_string(c + 1)] = rows;
    }
    j["points"].push_back(pj);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace mems::periodic

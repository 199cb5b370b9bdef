#include "mems/validate.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "mems/errors.hpp"

namespace mems::validate {

namespace {

using Index = Eigen::Index;
using ISeq = ChebSeq<Interval>;

Index idx(std::size_t i) { return static_cast<Index>(i); }

DenseMatrix<Interval> point_matrix(const Eigen::MatrixXd& M) {
  DenseMatrix<Interval> out(static_cast<std::size_t>(M.rows()), static_cast<std::size_t>(M.cols()));
  for (std::size_t i = 0; i < out.rows; ++i) {
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) = Interval(M(idx(i), idx(j)));
  }
  return out;
}

DenseMatrix<Interval> interval_jacobian(const SaddleVec<double>& xbar) {
  const Layout L{xbar.modes()};
  DenseMatrix<Interval> J(L.dim(), L.dim());
  assemble_DF(to_interval(xbar), J);
  return J;
}

/// y = M v in interval arithmetic, M a point matrix.
std::vector<Interval> mat_vec(const Eigen::MatrixXd& M, const std::vector<Interval>& v) {
  std::vector<Interval> y(static_cast<std::size_t>(M.rows()), Interval(0.0));
  for (Index i = 0; i < M.rows(); ++i) {
    Interval s(0.0);
    for (Index j = 0; j < M.cols(); ++j) s += Interval(M(i, j)) * v[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

/// Weighted norm of entries offset..offset+m-1 of v.
Interval seq_norm(const std::vector<Interval>& v, std::size_t offset, std::size_t m, const std::vector<Interval>& om) {
  Interval s(0.0);
  for (std::size_t n = 0; n < m; ++n) s += abs(v[offset + n]) * om[n];
  return s;
}

template <class T>
const ChebSeq<T>& component(const SaddleVec<T>& x, std::size_t c) {
  return c < 3 ? x.a[c] : x.b[c - 3];
}

/// Weighted norm restricted to row group g of column `col` of |M|.
Interval column_group_norm(const Eigen::MatrixXd& M, const Layout::Group& g, std::size_t col,
                           const std::vector<Interval>& om) {
  Interval s(0.0);
  for (std::size_t i = 0; i < g.size; ++i) {
    const Interval v = abs(Interval(M(idx(g.offset + i), idx(col))));
    s += g.sequence ? v * om[i] : v;
  }
  return s;
}

/// For each row group, sum over the six sequence components of the norms of
/// the A^(m) columns at their boundary rows.
std::array<Interval, 9> boundary_column_norms(const BlockOp& A, const Weight& w) {
  const Layout L{A.m};
  const auto om = weights<Interval>(w, A.m);
  const auto groups = L.groups();
  std::array<Interval, 9> out{};
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out[g] = Interval(0.0);
    for (std::size_t c = 0; c < 6; ++c) {
      const BoundaryRows br = boundary_rows(L, c);
      out[g] += column_group_norm(A.finite, groups[g], br.minus, om);
      if (br.plus) out[g] += column_group_norm(A.finite, groups[g], *br.plus, om);
    }
  }
  return out;
}

}  // namespace

BoundaryRows boundary_rows(const Layout& L, std::size_t c) {
  switch (c) {
    case 0: return {L.row_f(0), L.row_eta()};
    case 1: return {L.row_f(1), std::nullopt};
    case 2: return {L.row_f(2), std::nullopt};
    case 3: return {L.row_g(0), L.row_eta_b()};
    case 4: return {L.row_g(1), std::nullopt};
    case 5: return {L.row_g(2), std::nullopt};
    default: throw std::invalid_argument("boundary_rows: component index out of range");
  }
}

Eigen::VectorXd pack(const SaddleVec<double>& x) {
  const Layout L{x.modes()};
  Eigen::VectorXd v(idx(L.dim()));
  v(idx(L.lambda())) = x.lambda;
  v(idx(L.delta())) = x.delta;
  v(idx(L.gamma())) = x.gamma;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < L.m; ++n) {
      v(idx(L.a(j) + n)) = x.a[j].coef(n);
      v(idx(L.b(j) + n)) = x.b[j].coef(n);
    }
  }
  return v;
}

SaddleVec<double> unpack(const Eigen::VectorXd& v, std::size_t m) {
  const Layout L{m};
  if (static_cast<std::size_t>(v.size()) != L.dim()) throw std::invalid_argument("saddle unpack: size mismatch");
  SaddleVec<double> x;
  x.lambda = v(idx(L.lambda()));
  x.delta = v(idx(L.delta()));
  x.gamma = v(idx(L.gamma()));
  for (std::size_t j = 0; j < 3; ++j) {
    x.a[j] = ChebSeq<double>(m);
    x.b[j] = ChebSeq<double>(m);
    for (std::size_t n = 0; n < m; ++n) {
      x.a[j][n] = v(idx(L.a(j) + n));
      x.b[j][n] = v(idx(L.b(j) + n));
    }
  }
  return x;
}

SaddleVec<Interval> to_interval(const SaddleVec<double>& x) {
  SaddleVec<Interval> r;
  r.lambda = Interval(x.lambda);
  r.delta = Interval(x.delta);
  r.gamma = Interval(x.gamma);
  for (std::size_t j = 0; j < 3; ++j) {
    r.a[j] = mems::to_interval(x.a[j]);
    r.b[j] = mems::to_interval(x.b[j]);
  }
  return r;
}

Eigen::VectorXd projected_residual(const SaddleVec<double>& x) {
  const Layout L{x.modes()};
  const auto r = F_saddle(x);
  Eigen::VectorXd out(idx(L.dim()));
  out(idx(L.row_ell())) = r.ell;
  out(idx(L.row_eta())) = r.f.eta;
  out(idx(L.row_eta_b())) = r.g.eta;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t n = 0; n < L.m; ++n) {
      out(idx(L.row_f(j) + n)) = r.f.f[j].coef(n);
      out(idx(L.row_g(j) + n)) = r.g.f[j].coef(n);
    }
  }
  return out;
}

Eigen::MatrixXd jacobian(const SaddleVec<double>& x) {
  const Layout L{x.modes()};
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(idx(L.dim()), idx(L.dim()));
  assemble_DF(x, J);
  return J;
}

SaddleVec<double> seed_from_fold(double lambda, const steady::SteadyVec<double>& s) {
  const std::size_t m = s.modes();
  steady::SteadyVec<double> at = s;
  at.lambda = lambda;
  const Eigen::MatrixXd J = steady::jac_f_eq(at).rightCols(idx(3 * m + 1));
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  const Eigen::VectorXd v = svd.matrixV().col(idx(3 * m));

  SaddleVec<double> x;
  x.lambda = lambda;
  x.delta = s.delta;
  x.a = s.a;
  x.gamma = v(0);
  for (std::size_t j = 0; j < 3; ++j) {
    x.b[j] = ChebSeq<double>(m);
    for (std::size_t n = 0; n < m; ++n) x.b[j][n] = v(idx(1 + j * m + n));
  }
  const double scale = ell(x.b[0], m);
  if (!(std::abs(scale) > 1e-12)) throw SolverError("seed_from_fold: kernel vector is not normalizable");
  x.gamma /= scale;
  for (auto& b : x.b) b = (1.0 / scale) * b;
  return x;
}

SaddleVec<double> newton_saddle(const SaddleVec<double>& seed, double tol, int max_iter) {
  const std::size_t m = seed.modes();
  Eigen::VectorXd v = pack(seed);
  for (int it = 0; it <= max_iter; ++it) {
    const SaddleVec<double> x = unpack(v, m);
    const Eigen::VectorXd r = projected_residual(x);
    const double rn = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(rn)) break;
    if (rn <= tol) return x;
    if (it == max_iter) break;
    const Eigen::VectorXd dv = jacobian(x).partialPivLu().solve(-r);
    if (!dv.allFinite()) break;
    v += dv;
  }
  throw SolverError("Newton on the saddle-node map did not converge");
}

SaddleVec<double> compute_saddle(std::size_t m, double tol) {
  const continuation::Settings settings;
  const auto branch = steady::continue_branch(m, settings, 1000, 0.345);
  const auto fold = continuation::detect_fold(steady::make_problem(m), branch, settings);
  if (!fold) throw SolverError("compute_saddle: no fold on the steady branch");
  const auto s = steady::unpack(fold->param, fold->unknowns, m);
  return newton_saddle(seed_from_fold(fold->param, s), tol);
}

double kernel_singular_value(const SaddleVec<double>& x) {
  steady::SteadyVec<double> s;
  s.lambda = x.lambda;
  s.delta = x.delta;
  s.a = x.a;
  const std::size_t m = x.modes();
  const Eigen::MatrixXd J = steady::jac_f_eq(s).rightCols(idx(3 * m + 1));
  return Eigen::BDCSVD<Eigen::MatrixXd>(J).singularValues().minCoeff();
}

BlockOp build_A_dagger(const SaddleVec<double>& xbar) {
  BlockOp op;
  op.m = xbar.modes();
  op.finite = jacobian(xbar);
  op.tail = BlockOp::Tail::derivative;
  return op;
}

BlockOp build_A(const SaddleVec<double>& xbar) {
  const Eigen::MatrixXd J = jacobian(xbar);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  BlockOp op;
  op.m = xbar.modes();
  op.finite = lu.inverse();
  if (!op.finite.allFinite()) throw SolverError("build_A: DF^(m) is numerically singular");
  op.tail = BlockOp::Tail::inverse_derivative;
  return op;
}

SaddleVec<double> apply(const BlockOp& op, const SaddleVec<double>& x) {
  const std::size_t m = op.m;
  const Layout L{m};
  SaddleVec<double> head = x;
  for (auto& s : head.a) s = s.resized(m);
  for (auto& s : head.b) s = s.resized(m);
  const Eigen::VectorXd in = pack(head);
  Eigen::VectorXd boundary = Eigen::VectorXd::Zero(in.size());
  if (op.boundary_tail) {
    for (std::size_t c = 0; c < 6; ++c) {
      const ChebSeq<double>& src = component(x, c);
      const BoundaryRows br = boundary_rows(L, c);
      for (std::size_t n = m; n < src.size(); ++n) {
        const double u = op.tail == BlockOp::Tail::derivative ? src[n] : op.tail_factor(n) * src[n];
        boundary(idx(br.minus)) += (n % 2 == 0 ? 2.0 : -2.0) * u;
        if (br.plus) boundary(idx(*br.plus)) += 2.0 * u;
      }
    }
  }
  const Eigen::VectorXd fin =
      op.tail == BlockOp::Tail::derivative ? Eigen::VectorXd(op.finite * in + boundary) : Eigen::VectorXd(op.finite * (in - boundary));
  SaddleVec<double> out = unpack(fin, m);
  auto add_tail = [&](ChebSeq<double>& dst, const ChebSeq<double>& src) {
    if (src.size() <= m) return;
    dst = dst.resized(src.size());
    for (std::size_t n = m; n < src.size(); ++n) dst[n] = op.tail_factor(n) * src[n];
  };
  for (std::size_t j = 0; j < 3; ++j) {
    add_tail(out.a[j], x.a[j]);
    add_tail(out.b[j], x.b[j]);
  }
  return out;
}

Interval x_norm(const SaddleVec<Interval>& x, const Weight& w) {
  Interval r = max(max(abs(x.lambda), abs(x.delta)), abs(x.gamma));
  for (std::size_t j = 0; j < 3; ++j) {
    r = max(r, norm(x.a[j], w));
    r = max(r, norm(x.b[j], w));
  }
  return r;
}

Interval block_operator_norm(const DenseMatrix<Interval>& M, std::size_t m, const Weight& w, const Interval& tail) {
  const Layout L{m};
  if (M.rows != L.dim() || M.cols != L.dim()) throw std::invalid_argument("block_operator_norm: size mismatch");
  const auto om = weights<Interval>(w, m);
  Interval best(0.0);
  for (const auto& rg : L.groups()) {
    Interval total(0.0);
    for (const auto& cg : L.groups()) {
      if (!rg.sequence && !cg.sequence) {
        total += abs(M(rg.offset, cg.offset));
      } else if (!rg.sequence) {
        Interval d(0.0);
        for (std::size_t s = 0; s < m; ++s) d = max(d, abs(M(rg.offset, cg.offset + s)) / om[s]);
        total += d;
      } else if (!cg.sequence) {
        Interval c(0.0);
        for (std::size_t l = 0; l < m; ++l) c += abs(M(rg.offset + l, cg.offset)) * om[l];
        total += c;
      } else {
        Interval col_max(0.0);
        for (std::size_t s = 0; s < m; ++s) {
          Interval c(0.0);
          for (std::size_t l = 0; l < m; ++l) c += abs(M(rg.offset + l, cg.offset + s)) * om[l];
          col_max = max(col_max, c / om[s]);
        }
        total += col_max;
      }
    }
    if (rg.sequence) total += tail;
    best = max(best, total);
  }
  return best;
}

double float_defect(const BlockOp& A, const SaddleVec<double>& xbar, const Weight& w) {
  const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(A.finite.rows(), A.finite.cols()) - A.finite * jacobian(xbar);
  return block_operator_norm(point_matrix(B), A.m, w, Interval(0.0)).hi();
}

Interval bound_Y0(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w) {
  const std::size_t m = xbar.modes();
  const Layout L{m};
  const auto r = F_saddle(to_interval(xbar));

  std::vector<Interval> head(L.dim(), Interval(0.0));
  head[L.row_ell()] = r.ell;
  head[L.row_eta()] = r.f.eta;
  head[L.row_eta_b()] = r.g.eta;
  std::array<const ISeq*, 6> seqs{&r.f.f[0], &r.f.f[1], &r.f.f[2], &r.g.f[0], &r.g.f[1], &r.g.f[2]};
  std::array<std::size_t, 6> rows{L.row_f(0), L.row_f(1), L.row_f(2), L.row_g(0), L.row_g(1), L.row_g(2)};
  for (std::size_t c = 0; c < 6; ++c) {
    for (std::size_t n = 0; n < m; ++n) head[rows[c] + n] = seqs[c]->coef(n);
  }
  if (A.boundary_tail) {
    for (std::size_t c = 0; c < 6; ++c) {
      const BoundaryRows br = boundary_rows(L, c);
      for (std::size_t n = m; n < seqs[c]->size(); ++n) {
        const Interval u = (*seqs[c])[n] / Interval(2.0 * static_cast<double>(n));
        head[br.minus] -= Interval(n % 2 == 0 ? 2.0 : -2.0) * u;
        if (br.plus) head[*br.plus] -= Interval(2.0) * u;
      }
    }
  }

  const std::vector<Interval> out = mat_vec(A.finite, head);
  std::size_t max_len = m;
  for (const auto* s : seqs) max_len = std::max(max_len, s->size());
  const auto om = weights<Interval>(w, max_len);

  Interval y0 = max(max(abs(out[L.lambda()]), abs(out[L.delta()])), abs(out[L.gamma()]));
  const std::array<std::size_t, 6> cols{L.a(0), L.a(1), L.a(2), L.b(0), L.b(1), L.b(2)};
  for (std::size_t c = 0; c < 6; ++c) {
    Interval s = seq_norm(out, cols[c], m, om);
    for (std::size_t n = m; n < seqs[c]->size(); ++n) {
      s += abs((*seqs[c])[n]) / Interval(2.0 * static_cast<double>(n)) * om[n];
    }
    y0 = max(y0, s);
  }
  return y0;
}

Interval bound_Z0(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w) {
  const std::size_t m = xbar.modes();
  const std::size_t N = Layout{m}.dim();
  const DenseMatrix<Interval> DF = interval_jacobian(xbar);
  DenseMatrix<Interval> B(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    B(i, i) = Interval(1.0);
    for (std::size_t k = 0; k < N; ++k) {
      const double aik = A.finite(idx(i), idx(k));
      if (aik == 0.0) continue;
      const Interval s(aik);
      for (std::size_t j = 0; j < N; ++j) B(i, j) -= s * DF(k, j);
    }
  }
  return block_operator_norm(B, m, w, Interval(0.0));
}

Interval norm_A(const BlockOp& A, const Weight& w) {
  const Interval tail = Interval(1.0) / Interval(2.0 * static_cast<double>(A.m));
  Interval n = block_operator_norm(point_matrix(A.finite), A.m, w, tail);
  if (!A.boundary_tail) return n;
  // tail inputs reach the boundary rows through Lambda^-1 and E, |E u| <= nu^-m ||u||
  const Interval coupling = tail / pow(Interval(w.nu), static_cast<unsigned>(A.m));
  Interval extra(0.0);
  for (const Interval& c : boundary_column_norms(A, w)) extra = max(extra, c);
  return n + coupling * extra;
}

namespace {

/// Bounds on ||c'(h)||, h in the unit ball, for the right-hand side derivative
/// feeding each sequence row group (f1, f2, f3, g1, g2, g3); they control the
/// defect on the tail rows.
std::array<Interval, 6> tail_row_bounds(const SaddleVec<Interval>& x, const Weight& w) {
  const Interval lam = abs(x.lambda);
  const ISeq& a2 = x.a[1];
  const ISeq& a3 = x.a[2];
  const ISeq& b2 = x.b[1];
  const ISeq& b3 = x.b[2];
  const ISeq a3sq = conv(a3, a3);
  const ISeq a2a3 = conv(a2, a3);
  const ISeq a3b3 = conv(a3, b3);
  const ISeq mix = conv(a3, b2) + conv(a2, b3);
  const Interval two(2.0);
  return {
      Interval(1.0),
      two * lam * norm(a3, w) + norm(a3sq, w),
      two * norm(a2a3, w) + norm(a3sq, w),
      Interval(1.0),
      two * lam * (norm(a3, w) + norm(b3, w)) + two * norm(a3b3, w),
      two * norm(a3b3, w) + two * norm(mix, w) + norm(a3sq, w) + two * norm(a2a3, w),
  };
}

}  // namespace

Interval bound_Z1_componentwise(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w) {
  const std::size_t m = xbar.modes();
  const Layout L{m};
  const SaddleVec<Interval> x = to_interval(xbar);
  const Interval lam = abs(x.lambda);
  const ISeq& a2 = x.a[1];
  const ISeq& a3 = x.a[2];
  const ISeq& b2 = x.b[1];
  const ISeq& b3 = x.b[2];
  const ISeq a3sq = conv(a3, a3);
  const ISeq a2a3 = conv(a2, a3);
  const ISeq a3b3 = conv(a3, b3);
  const ISeq mix = conv(a3, b2) + conv(a2, b3);

  auto Psi = [&](const ISeq& alpha, std::size_t n) { return convolution_tail_bound(alpha, n, m, w); };
  const Interval two(2.0);

  // bounds on |psi_n| for n = 0..m over the unit ball, one per sequence row
  std::array<std::vector<Interval>, 6> psi;
  for (auto& p : psi) p.assign(m + 1, Interval(0.0));
  const Interval first_tail_mode = Interval(1.0) / weight_at<Interval>(w, m);
  psi[0][m] = first_tail_mode;  // (h_{a2})_m enters row m-1 of f1
  psi[3][m] = first_tail_mode;  // (h_{b2})_m enters row m-1 of g1
  for (std::size_t n = 0; n <= m; ++n) {
    psi[1][n] = two * lam * Psi(a3, n);
    psi[2][n] = two * Psi(a2a3, n) + Psi(a3sq, n);
    psi[4][n] = two * lam * (Psi(a3, n) + Psi(b3, n));
    psi[5][n] = two * Psi(a3b3, n) + two * Psi(mix, n) + Psi(a3sq, n) + two * Psi(a2a3, n);
  }

  const Interval inv_nu = Interval(1.0) / Interval(w.nu);
  std::vector<Interval> zhat(L.dim(), Interval(0.0));
  zhat[L.row_eta()] = inv_nu;
  zhat[L.row_eta_b()] = inv_nu;
  const std::array<std::size_t, 6> rows{L.row_f(0), L.row_f(1), L.row_f(2), L.row_g(0), L.row_g(1), L.row_g(2)};
  for (std::size_t c = 0; c < 6; ++c) {
    zhat[rows[c]] = inv_nu;
    for (std::size_t n = 1; n < m; ++n) zhat[rows[c] + n] = psi[c][n + 1] + psi[c][n - 1];
  }

  const std::vector<Interval> v = mat_vec(A.finite.cwiseAbs(), zhat);
  const auto om = weights<Interval>(w, m);

  const std::array<Interval, 6> psi_inf = tail_row_bounds(x, w);
  const Interval tail_scale = Interval(2.0 * w.nu) / Interval(2.0 * static_cast<double>(m));

  Interval z1 = max(max(v[L.lambda()], v[L.delta()]), v[L.gamma()]);
  const std::array<std::size_t, 6> cols{L.a(0), L.a(1), L.a(2), L.b(0), L.b(1), L.b(2)};
  for (std::size_t c = 0; c < 6; ++c) {
    z1 = max(z1, seq_norm(v, cols[c], m, om) + tail_scale * psi_inf[c]);
  }
  return z1;
}

Interval bound_Z1(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w) {
  const std::size_t m = xbar.modes();
  const Layout L{m};
  const SaddleVec<Interval> x = to_interval(xbar);
  const Interval two_lam = Interval(2.0) * x.lambda;
  const ISeq& a2 = x.a[1];
  const ISeq& a3 = x.a[2];
  const ISeq& b2 = x.b[1];
  const ISeq& b3 = x.b[2];
  const ISeq unit{Interval(1.0)};
  const ISeq a3sq = conv(a3, a3);
  const ISeq a2a3 = conv(a2, a3);
  const ISeq a3b3 = conv(a3, b3);
  const ISeq mix = conv(a3, b2) + conv(a2, b3);

  struct Coupling {
    std::size_t row;
    const ISeq* alpha;
    Interval scale;
  };
  struct Input {
    std::size_t boundary_row;             // alternating sum at y = -1
    std::optional<std::size_t> plus_row;  // plain sum at y = +1
    std::vector<Coupling> couplings;
  };
  // derivative of each right-hand side with respect to one tail component
  const std::array<Input, 6> inputs{{
      {L.row_f(0), L.row_eta(), {}},
      {L.row_f(1), std::nullopt,
       {{L.row_f(0), &unit, Interval(1.0)}, {L.row_f(2), &a3sq, Interval(-1.0)}, {L.row_g(2), &a3b3, Interval(-2.0)}}},
      {L.row_f(2), std::nullopt,
       {{L.row_f(1), &a3, two_lam},
        {L.row_f(2), &a2a3, Interval(-2.0)},
        {L.row_g(1), &b3, two_lam},
        {L.row_g(2), &mix, Interval(-2.0)}}},
      {L.row_g(0), L.row_eta_b(), {}},
      {L.row_g(1), std::nullopt, {{L.row_g(0), &unit, Interval(1.0)}, {L.row_g(2), &a3sq, Interval(-1.0)}}},
      {L.row_g(2), std::nullopt, {{L.row_g(1), &a3, two_lam}, {L.row_g(2), &a2a3, Interval(-2.0)}}},
  }};

  const auto om = weights<Interval>(w, m);
  const auto groups = L.groups();
  // sup over tail modes of the image norm, per (output group, input component)
  std::array<std::array<Interval, 6>, 9> sup{};
  for (auto& row : sup) row.fill(Interval(0.0));

  for (std::size_t beta = 0; beta < 6; ++beta) {
    const Input& in = inputs[beta];
    std::size_t max_len = 1;
    for (const auto& c : in.couplings) max_len = std::max(max_len, c.alpha->size());
    // beyond this mode only the boundary rows see e_l, and 1/omega_l decreases
    const std::size_t l_last = m + max_len + 2;
    Interval omega_l = weight_at<Interval>(w, m);
    for (std::size_t l = m; l <= l_last; ++l) {
      std::vector<std::pair<std::size_t, Interval>> z;
      if (!A.boundary_tail) {
        z.emplace_back(in.boundary_row, Interval(l % 2 == 0 ? 2.0 : -2.0));
        if (in.plus_row) z.emplace_back(*in.plus_row, Interval(2.0));
      }
      for (const auto& c : in.couplings) {
        for (std::size_t n = 1; n < m; ++n) {
          const Interval v = conv_matrix_entry(*c.alpha, n + 1, l) - conv_matrix_entry(*c.alpha, n - 1, l);
          if (v.is_point() && v.lo() == 0.0) continue;
          z.emplace_back(c.row + n, c.scale * v);
        }
      }
      for (std::size_t g = 0; g < groups.size(); ++g) {
        Interval acc(0.0);
        for (std::size_t i = 0; i < groups[g].size; ++i) {
          const std::size_t r = groups[g].offset + i;
          Interval s(0.0);
          for (const auto& [col, val] : z) s += Interval(A.finite(idx(r), idx(col))) * val;
          acc += groups[g].sequence ? abs(s) * om[i] : abs(s);
        }
        sup[g][beta] = max(sup[g][beta], acc / omega_l);
      }
      omega_l *= Interval(w.nu);
    }
  }

  const std::array<Interval, 6> psi_inf = tail_row_bounds(x, w);
  const Interval tail_scale = Interval(2.0 * w.nu) / Interval(2.0 * static_cast<double>(m));
  // the tail rows of the defect also reach the finite part through E Lambda^-1
  std::array<Interval, 9> boundary_feed{};
  boundary_feed.fill(Interval(0.0));
  if (A.boundary_tail) {
    const Interval nu_m = pow(Interval(w.nu), static_cast<unsigned>(m));
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t c = 0; c < 6; ++c) {
        const BoundaryRows br = boundary_rows(L, c);
        Interval cn = column_group_norm(A.finite, groups[g], br.minus, om);
        if (br.plus) cn += column_group_norm(A.finite, groups[g], *br.plus, om);
        boundary_feed[g] += tail_scale * psi_inf[c] / nu_m * cn;
      }
    }
  }
  Interval z1(0.0);
  std::size_t seq_index = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Interval total = boundary_feed[g];
    for (std::size_t beta = 0; beta < 6; ++beta) total += sup[g][beta];
    if (groups[g].sequence) total += tail_scale * psi_inf[seq_index++];
    z1 = max(z1, total);
  }
  return z1;
}

Interval bound_Z2(const SaddleVec<double>& xbar, const BlockOp& A, const Weight& w, double r_star) {
  if (!(r_star > 0.0)) throw std::invalid_argument("bound_Z2: r_star must be positive");
  const SaddleVec<Interval> x = to_interval(xbar);
  const Interval lam = abs(x.lambda);
  const Interval na2 = norm(x.a[1], w);
  const Interval na3 = norm(x.a[2], w);
  const Interval nb2 = norm(x.b[1], w);
  const Interval nb3 = norm(x.b[2], w);
  const Interval r(r_star);
  const Interval z_a2 = Interval(4.0) * na3 + Interval(2.0) * lam + Interval(3.0) * r;
  const Interval z_a3 = Interval(4.0) * na3 + Interval(2.0) * na2 + Interval(3.0) * r;
  const Interval z_b2 = Interval(4.0) * nb3 + Interval(4.0) * na3 + Interval(4.0) * lam + Interval(6.0) * r;
  const Interval z_b3 = Interval(4.0) * na2 + Interval(2.0) * nb2 + Interval(4.0) * nb3 + Interval(8.0) * na3 +
                        Interval(9.0) * r;
  const Interval zmax = max(max(z_a2, z_a3), max(z_b2, z_b3));
  return Interval(2.0 * w.nu) * norm_A(A, w) * zmax;
}

Interval radii_polynomial(const RadiiBounds& b, double r) {
  const Interval ri(r);
  return b.Z2 * ri * ri + (b.Z0 + b.Z1 - Interval(1.0)) * ri + b.Y0;
}

RadiiOutcome radii_verify(const RadiiBounds& bounds, double r_star) {
  RadiiOutcome out;
  const double a = bounds.Z2.hi();
  const double b = bounds.Z0.hi() + bounds.Z1.hi() - 1.0;
  const double c = bounds.Y0.hi();
  if (!(b < 0.0)) {
    out.failure = "Z0 + Z1 >= 1";
    return out;
  }
  const double disc = b * b - 4.0 * a * c;
  if (!(disc > 0.0)) {
    out.failure = "negative discriminant: Y0 too large for the Z bounds";
    return out;
  }
  const double sq = std::sqrt(disc);
  const double lower = 2.0 * c / (-b + sq);
  const double upper = a > 0.0 ? (-b + sq) / (2.0 * a) : std::numeric_limits<double>::infinity();
  std::vector<double> candidates;
  for (double eps = 1e-12; eps < 0.5; eps *= 10.0) candidates.push_back(lower * (1.0 + eps));
  if (std::isfinite(upper)) candidates.push_back(0.5 * (lower + upper));
  if (lower == 0.0) candidates.push_back(std::min(r_star, 0.5 * upper));
  for (double r : candidates) {
    if (!(r > 0.0)) continue;
    if (r > r_star) {
      out.failure = "lower root exceeds r_star";
      return out;
    }
    if (radii_polynomial(bounds, r).hi() < 0.0) {
      out.r0 = r;
      return out;
    }
  }
  out.failure = "p(r) < 0 could not be certified near the lower root";
  return out;
}

ProofResult prove_saddle_node(std::size_t m, double nu, double r_star) {
  const Weight w(nu);
  ProofResult res;
  res.m = m;
  res.nu = nu;
  res.r_star = r_star;

  const auto t0 = std::chrono::steady_clock::now();
  res.xbar = compute_saddle(m);
  res.newton_residual = projected_residual(res.xbar).cwiseAbs().maxCoeff();
  res.kernel_sigma = kernel_singular_value(res.xbar);
  const auto t1 = std::chrono::steady_clock::now();

  const BlockOp A = build_A(res.xbar);
  res.inverse_defect = float_defect(A, res.xbar, w);
  res.bounds.Y0 = bound_Y0(res.xbar, A, w);
  res.bounds.Z0 = bound_Z0(res.xbar, A, w);
  res.bounds.Z1 = bound_Z1(res.xbar, A, w);
  res.bounds.Z1_componentwise = bound_Z1_componentwise(res.xbar, A, w);
  res.bounds.Z2 = bound_Z2(res.xbar, A, w, r_star);
  const RadiiOutcome rv = radii_verify(res.bounds, r_star);
  res.bounds.r0 = rv.r0;
  res.failure = rv.failure;
  const auto t2 = std::chrono::steady_clock::now();
  res.seconds_newton = std::chrono::duration<double>(t1 - t0).count();
  res.seconds_bounds = std::chrono::duration<double>(t2 - t1).count();

  // |lambda| and |U(0)| are both dominated by the X norm
  const double r = rv.r0.value_or(0.0);
  const Interval ball(-r, r);
  res.lambda_star = Interval(res.xbar.lambda) + ball;
  res.u_center = eval(mems::to_interval(res.xbar.a[0]), 0.0) + ball;
  return res;
}

std::string certificate_json(const ProofResult& p) {
  using nlohmann::json;
  auto iv = [](const Interval& x) { return json::array({x.lo(), x.hi()}); };
  json j;
  j["m"] = p.m;
  j["nu"] = p.nu;
  j["r_star"] = p.r_star;
  j["proved"] = p.proved();
  j["failure"] = p.failure;
  j["Y0"] = iv(p.bounds.Y0);
  j["Z0"] = iv(p.bounds.Z0);
  j["Z1"] = iv(p.bounds.Z1);
  j["Z2"] = iv(p.bounds.Z2);
  j["Z1_componentwise"] = iv(p.bounds.Z1_componentwise);
  j["r0"] = p.bounds.r0 ? json(*p.bounds.r0) : json(nullptr);
  j["lambda_star"] = iv(p.lambda_star);
  j["four_lambda_star"] = iv(Interval(4.0) * p.lambda_star);
  j["u_center"] = iv(p.u_center);
  j["newton_residual"] = p.newton_residual;
  j["kernel_singular_value"] = p.kernel_sigma;
  j["inverse_defect"] = p.inverse_defect;
  j["choices"] = {
      {"normalization", "value at y = 0 of the first m modes of b1, scaled to 1 at the computed kernel"},
      {"approximate_inverse", "A^(m) = inverse of DF^(m), tail 1/(2n), boundary sums of the tail fed back through A^(m)"},
      {"operator_norm_A", "max over the nine row groups of weighted column sums of |A^(m)|, plus 1/(2m) on a/b rows and the boundary feed"},
      {"injectivity_of_A", "implied by Z0 + Z1 < 1 (Neumann series for A A_dagger)"},
  };
  json xb;
  xb["lambda"] = p.xbar.lambda;
  xb["delta"] = p.xbar.delta;
  xb["gamma"] = p.xbar.gamma;
  for (std::size_t k = 0; k < 3; ++k) {
    xb["a" + std::to_string(k + 1)] = p.xbar.a[k].coeffs;
    xb["b" + std::to_string(k + 1)] = p.xbar.b[k].coeffs;
  }
  j["xbar"] = xb;
  return j.dump(1);
}

}  // namespace mems::validate

#pragma once

// Time-periodic solutions, even in time, of the scaled hyperbolic MEMS
// equation. Time is rescaled to period 2 pi, so the spatial system reads
//   U1_y = U2,  U2_y = lambda U3^2 + omega^2 U1_tt,  U3_y = -U2 U3^2,
// with U1(-1,t) = 0, U2(-1,t) = delta(t), U3(-1,t) = 1 and U1(1,t) = 0.
// Coefficients a_{n,k} represent sum a_{n,k} m_{n,k} T_n(y) cos(k t) with
// m_{n,k} = (n > 0 ? 2 : 1) * (k > 0 ? 2 : 1).

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mems/continuation.hpp"
#include "mems/eigen.hpp"
#include "mems/seqspace.hpp"

namespace mems::periodic {

class FourierChebGrid {
 public:
  FourierChebGrid() = default;
  FourierChebGrid(std::size_t cheb_modes, std::size_t fourier_modes)
      : m_(cheb_modes), K_(fourier_modes), data_(cheb_modes * fourier_modes, 0.0) {}

  [[nodiscard]] std::size_t cheb_modes() const { return m_; }
  [[nodiscard]] std::size_t fourier_modes() const { return K_; }

  double& operator()(std::size_t n, std::size_t k) { return data_[n * K_ + k]; }
  double operator()(std::size_t n, std::size_t k) const { return data_[n * K_ + k]; }
  /// Entry with two-sided indices and implicit zeros outside the support.
  [[nodiscard]] double sym(std::ptrdiff_t n, std::ptrdiff_t k) const {
    const auto nn = static_cast<std::size_t>(n < 0 ? -n : n);
    const auto kk = static_cast<std::size_t>(k < 0 ? -k : k);
    return nn < m_ && kk < K_ ? data_[nn * K_ + kk] : 0.0;
  }

  /// Chebyshev sequence of Fourier mode k.
  [[nodiscard]] ChebSeq<double> column(std::size_t k) const;
  void set_column(std::size_t k, const ChebSeq<double>& a);

  /// Copy truncated or zero-padded to the given sizes.
  [[nodiscard]] FourierChebGrid resized(std::size_t m, std::size_t K) const;

  [[nodiscard]] const std::vector<double>& data() const { return data_; }

 private:
  std::size_t m_ = 0;
  std::size_t K_ = 0;
  std::vector<double> data_;
};

FourierChebGrid operator+(const FourierChebGrid& a, const FourierChebGrid& b);
FourierChebGrid operator*(double s, const FourierChebGrid& a);

/// Two-dimensional convolution with symmetric extension in both indices.
FourierChebGrid conv2(const FourierChebGrid& a, const FourierChebGrid& b);

/// U(t, y) represented by the grid.
double eval(const FourierChebGrid& a, double t, double y);

struct PeriodicVec {
  double lambda = 0.0;
  double omega = 0.0;
  std::vector<double> delta;  // cosine coefficients of U_y(-1, t)
  std::array<FourierChebGrid, 3> a;

  [[nodiscard]] std::size_t cheb_modes() const { return a[0].cheb_modes(); }
  [[nodiscard]] std::size_t fourier_modes() const { return a[0].fourier_modes(); }
};

struct PeriodicResidual {
  std::vector<double> eta;
  std::array<FourierChebGrid, 3> g;
};

/// Full residual; the grids carry the complete finite support.
PeriodicResidual f_per(const PeriodicVec& P);

/// Layout (delta_0..delta_{K-1}, a1, a2, a3), each grid row-major in (n, k).
Eigen::VectorXd pack(const PeriodicVec& P);
PeriodicVec unpack(double lambda, double omega, const Eigen::VectorXd& x, std::size_t m, std::size_t K);

/// Residual (eta, g1, g2, g3) restricted to n < m, k < K.
Eigen::VectorXd projected_residual(const PeriodicVec& P);

/// N x (N+1) Jacobian, N = K (3m + 1); column 0 is d/d lambda.
Eigen::MatrixXd jacobian(const PeriodicVec& P);

continuation::Problem make_problem(double omega, std::size_t m, std::size_t K);

/// A steady state placed in the k = 0 slice.
PeriodicVec embed_steady(double lambda, double delta, const std::array<ChebSeq<double>, 3>& a, double omega,
                         std::size_t m, std::size_t K);

/// omega = pi p / (2 q); requires p, q > 0.
double frequency(int p, int q);

/// Bifurcation predictor: the steady state at lambda0 (mu_k(lambda0) =
/// omega^2) plus b cos(t) times the eigenfunction, with the induced first
/// order terms in U2 and U3.
PeriodicVec predictor(int k, int p, int q, double b, const eigen::EigenBranch& eig_branch, std::size_t m,
                      std::size_t K);

struct PeriodicBranch {
  int k = 1;
  int p = 1;
  int q = 1;
  double omega = 0.0;
  double lambda0 = 0.0;
  std::size_t m = 0;
  std::size_t K = 0;
  continuation::Branch arc;
};

/// Corrects the predictor on the hyperplane orthogonal to its perturbation
/// and continues the branch, oriented toward growing amplitude. Stops on
/// `steps` points, touchdown (min U <= -1), or when `keep_going` fails.
PeriodicBranch continue_branch(const PeriodicVec& seed, const PeriodicVec& steady_base, std::size_t steps,
                               double ds, const continuation::Settings& settings,
                               const std::function<bool(const PeriodicVec&)>& keep_going = {});

/// Predictor plus continuation for the (k, p, q) branch, metadata filled in.
PeriodicBranch compute_branch(int k, int p, int q, std::size_t m, std::size_t K, const eigen::EigenBranch& eig_branch,
                              double b, std::size_t steps, const continuation::Settings& settings,
                              const std::function<bool(const PeriodicVec&)>& keep_going = {});

/// Min and max of U over a fixed sample grid of (t, y).
struct Extremes {
  double min = 0.0;
  double max = 0.0;
};
Extremes sample_extremes(const PeriodicVec& P);

/// Largest |a_{n,k}| over the last Chebyshev row and the last Fourier column,
/// relative to the largest coefficient.
double tail_ratio(const PeriodicVec& P);

/// CSV with header lambda,omega,p,q,sup_norm,u_center; one row per point.
void write_branch_csv(const PeriodicBranch& branch, const std::filesystem::path& path);
/// JSON with metadata and full coefficient arrays every `sample_every` points.
void write_branch_json(const PeriodicBranch& branch, const std::filesystem::path& path, std::size_t sample_every = 10);

}  // namespace mems::periodic

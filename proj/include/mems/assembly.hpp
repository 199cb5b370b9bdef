#pragma once

// Helpers that write the rows n = 1..m-1 of (T c) and of T M(alpha) into a
// dense matrix. Any matrix type with operator()(i, j) and a Scalar typedef
// works, so the same code fills double and interval Jacobians.

#include <cstddef>

#include "mems/seqspace.hpp"

namespace mems {

/// J(r0 + n, c0 + l) += scale * (T M(alpha))_{n,l} for 1 <= n < m, 0 <= l < m.
template <typename Mat, typename T>
void add_T_conv_block(Mat& J, std::size_t r0, std::size_t c0, const ChebSeq<T>& alpha, std::size_t m,
                      const T& scale) {
  for (std::size_t n = 1; n < m; ++n) {
    for (std::size_t l = 0; l < m; ++l) {
      const T v = conv_matrix_entry(alpha, n + 1, l) - conv_matrix_entry(alpha, n - 1, l);
      J(r0 + n, c0 + l) = J(r0 + n, c0 + l) + scale * v;
    }
  }
}

/// J(r0 + n, c0 + l) += scale * T_{n,l} for 1 <= n < m (identity in place of M).
template <typename Mat, typename T>
void add_T_identity_block(Mat& J, std::size_t r0, std::size_t c0, std::size_t m, const T& scale) {
  for (std::size_t n = 1; n < m; ++n) {
    if (n + 1 < m) J(r0 + n, c0 + n + 1) = J(r0 + n, c0 + n + 1) + scale;
    J(r0 + n, c0 + n - 1) = J(r0 + n, c0 + n - 1) - scale;
  }
}

/// J(r0 + n, col) += scale * (T c)_n for 1 <= n < m.
template <typename Mat, typename T>
void add_T_column(Mat& J, std::size_t r0, std::size_t col, const ChebSeq<T>& c, std::size_t m, const T& scale) {
  for (std::size_t n = 1; n < m; ++n) {
    J(r0 + n, col) = J(r0 + n, col) + scale * (c.coef(n + 1) - c.coef(n - 1));
  }
}

/// Row 0 (alternating boundary sum) and the 2n diagonal of a variable block.
template <typename Mat>
void add_ivp_linear_block(Mat& J, std::size_t r0, std::size_t c0, std::size_t m) {
  using T = typename Mat::Scalar;
  for (std::size_t l = 0; l < m; ++l) {
    const double w = l == 0 ? 1.0 : (l % 2 == 0 ? 2.0 : -2.0);
    J(r0, c0 + l) = J(r0, c0 + l) + T(w);
  }
  for (std::size_t n = 1; n < m; ++n) {
    J(r0 + n, c0 + n) = J(r0 + n, c0 + n) + T(2.0 * static_cast<double>(n));
  }
}

/// Value-at-(+1) functional row.
template <typename Mat>
void add_boundary_plus_row(Mat& J, std::size_t row, std::size_t c0, std::size_t m) {
  using T = typename Mat::Scalar;
  for (std::size_t l = 0; l < m; ++l) J(row, c0 + l) = J(row, c0 + l) + T(l == 0 ? 1.0 : 2.0);
}

}  // namespace mems

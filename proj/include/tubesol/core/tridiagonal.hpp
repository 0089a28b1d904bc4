#pragma once

// Thin wrappers over LAPACK's tridiagonal routines plus a Sturm counter.

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tubesol/core/error.hpp"

namespace tubesol::linalg {

/// Symmetric tridiagonal matrix: diagonal `d` (size N) and off-diagonal `e` (size N-1).
struct SymTridiagonal {
  Eigen::VectorXd d;
  Eigen::VectorXd e;

  Eigen::Index size() const { return d.size(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    const Eigen::Index n = d.size();
    Eigen::VectorXd y = d.cwiseProduct(x);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      y[i] += e[i] * x[i + 1];
      y[i + 1] += e[i] * x[i];
    }
    return y;
  }
};

/// Number of eigenvalues strictly below `shift` (Sylvester inertia of T - shift·I).
inline int count_below(const SymTridiagonal& t, double shift) {
  const Eigen::Index n = t.size();
  int count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double off = (i == 0) ? 0.0 : t.e[i - 1] * t.e[i - 1] / q;
    q = t.d[i] - shift - off;
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

struct TridiagonalEigen {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< columns, Euclidean-orthonormal
};

/// Eigenpairs with indices [first, first + count) in ascending order (LAPACK dstevx).
inline TridiagonalEigen lowest_eigenpairs(const SymTridiagonal& t, int first, int count) {
  const lapack_int n = static_cast<lapack_int>(t.size());
  require(n >= 1, ErrorKind::InvalidArgument, "empty tridiagonal matrix");
  require(first >= 0 && count >= 1, ErrorKind::InvalidArgument, "invalid eigenpair index range");
  const lapack_int il = first + 1;
  const lapack_int iu = std::min<lapack_int>(n, first + count);
  require(il <= iu, ErrorKind::RangeExceeded, "requested eigenpairs beyond matrix size");

  std::vector<double> d(t.d.data(), t.d.data() + n);
  std::vector<double> e(static_cast<std::size_t>(std::max<lapack_int>(n - 1, 1)), 0.0);
  for (lapack_int i = 0; i + 1 < n; ++i) e[i] = t.e[i];
  lapack_int found = 0;
  std::vector<double> w(n);
  const lapack_int cols = iu - il + 1;
  std::vector<double> z(static_cast<std::size_t>(n) * cols);
  std::vector<lapack_int> ifail(n);
  const lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0,
                                         il, iu, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(),
                                         n, ifail.data());
  require(info == 0, ErrorKind::NonConvergence, "dstevx failed with info=" + std::to_string(info));

  TridiagonalEigen out;
  out.values = Eigen::Map<Eigen::VectorXd>(w.data(), found);
  out.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, found);
  return out;
}

/// LU factorization with partial pivoting of a general tridiagonal matrix; reusable for many
/// right-hand sides (LAPACK dgttrf/dgttrs).
class TridiagonalLU {
 public:
  TridiagonalLU() = default;

  /// `lower` and `upper` have size N-1.
  TridiagonalLU(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag, const Eigen::VectorXd& upper) {
    n_ = static_cast<lapack_int>(diag.size());
    dl_.assign(lower.data(), lower.data() + std::max<lapack_int>(n_ - 1, 0));
    d_.assign(diag.data(), diag.data() + n_);
    du_.assign(upper.data(), upper.data() + std::max<lapack_int>(n_ - 1, 0));
    du2_.assign(static_cast<std::size_t>(std::max<lapack_int>(n_ - 2, 1)), 0.0);
    ipiv_.assign(n_, 0);
    double anorm = 0.0;  // 1-norm: max column sum
    for (lapack_int j = 0; j < n_; ++j) {
      double col = std::abs(diag[j]);
      if (j > 0) col += std::abs(upper[j - 1]);
      if (j + 1 < n_) col += std::abs(lower[j]);
      anorm = std::max(anorm, col);
    }
    if (dl_.empty()) dl_.push_back(0.0), du_.push_back(0.0);
    const lapack_int info = LAPACKE_dgttrf(n_, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data());
    singular_ = info > 0;
    if (!singular_) {
      LAPACKE_dgtcon('1', n_, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data(), anorm, &rcond_);
    }
  }

  bool singular() const { return singular_; }
  double rcond() const { return rcond_; }

  /// Solves in place for every column of `rhs`.
  void solve_in_place(Eigen::MatrixXd& rhs) const {
    require(!singular_, ErrorKind::SingularFiberOperator, "tridiagonal factor is singular");
    require(rhs.rows() == n_, ErrorKind::GridMismatch, "right-hand side has wrong length");
    const lapack_int info = LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', n_, static_cast<lapack_int>(rhs.cols()),
                                           dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data(),
                                           rhs.data(), n_);
    require(info == 0, ErrorKind::SingularFiberOperator, "dgttrs failed");
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::MatrixXd x = rhs;
    solve_in_place(x);
    return x.col(0);
  }

 private:
  lapack_int n_ = 0;
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<lapack_int> ipiv_;
  double rcond_ = 0.0;
  bool singular_ = true;
};

}  // namespace tubesol::linalg

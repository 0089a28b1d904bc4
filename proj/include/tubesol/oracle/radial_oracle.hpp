#pragma once

// Reference values for the radial problem from an independent discretization: the
// non-conservative central scheme U'' + (n-1)/r·U' with the ghost-node condition at r = 0,
// dense Newton with grid continuation, dense symmetric eigensolves, and Richardson
// extrapolation between two grids.

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/params.hpp"

namespace tubesol::oracle {

struct RadialReference {
  int intervals = 0;
  double center = 0.0;          ///< U(0)
  double boundary_slope = 0.0;  ///< U'(1)
  double mu0 = 0.0;
  double mu1 = 0.0;
};

namespace detail {

// Row j of the scheme: a_minus·u_{j-1} + a_diag·u_j + a_plus·u_{j+1}.
struct Stencil {
  double minus, diag, plus;
};

inline Stencil stencil(int n, int j, double h) {
  if (j == 0) return {0.0, -2.0 * n / (h * h), 2.0 * n / (h * h)};
  const double r = j * h;
  const double drift = (n - 1) / (2.0 * r * h);
  return {1.0 / (h * h) - drift, -2.0 / (h * h), 1.0 / (h * h) + drift};
}

inline double pos_pow(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

inline Eigen::VectorXd residual(const ProblemParams& prm, const Eigen::VectorXd& u, double h) {
  const Eigen::Index N = u.size();  // free nodes 0..N-1; u_N = 0
  Eigen::VectorXd f(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const auto s = stencil(prm.n, int(j), h);
    const double left = j > 0 ? u[j - 1] : 0.0;
    const double right = j + 1 < N ? u[j + 1] : 0.0;
    f[j] = s.minus * left + s.diag * u[j] + s.plus * right + pos_pow(u[j], prm.p);
  }
  return f;
}

inline Eigen::VectorXd newton(const ProblemParams& prm, Eigen::VectorXd u, double h) {
  const Eigen::Index N = u.size();
  Eigen::VectorXd f = residual(prm, u, h);
  for (int it = 0; it < 100; ++it) {
    const double norm = f.norm();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto s = stencil(prm.n, int(j), h);
      if (j > 0) jac(j, j - 1) = s.minus;
      jac(j, j) = s.diag + prm.p * pos_pow(u[j], prm.p - 1.0);
      if (j + 1 < N) jac(j, j + 1) = s.plus;
    }
    const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
    double damping = 1.0;
    Eigen::VectorXd trial = u + step;
    Eigen::VectorXd ft = residual(prm, trial, h);
    while (ft.norm() > norm && damping > 1e-4) {
      damping *= 0.5;
      trial = u + damping * step;
      ft = residual(prm, trial, h);
    }
    const bool stalled = !(ft.norm() < norm);
    if (!stalled) {
      u = trial;
      f = ft;
    }
    if (stalled || step.cwiseAbs().maxCoeff() < 1e-13 * u.cwiseAbs().maxCoeff()) break;
  }
  require(u.minCoeff() > 0.0, ErrorKind::NonConvergence, "oracle Newton did not reach the positive solution");
  return u;
}

// Linear interpolation of free-node values onto a grid with twice as many intervals.
inline Eigen::VectorXd refine(const Eigen::VectorXd& coarse) {
  const Eigen::Index N = coarse.size();
  Eigen::VectorXd fine(2 * N);
  for (Eigen::Index j = 0; j < N; ++j) {
    fine[2 * j] = coarse[j];
    fine[2 * j + 1] = 0.5 * (coarse[j] + (j + 1 < N ? coarse[j + 1] : 0.0));
  }
  return fine;
}

}  // namespace detail

/// Free-node values U(r_0..r_{N-1}) of the oracle scheme on `intervals` intervals.
inline Eigen::VectorXd dense_ground_state(const ProblemParams& prm, int intervals) {
  prm.validate();
  require(prm.n <= 3, ErrorKind::InvalidArgument, "radial oracle supports n <= 3");
  int level = intervals;
  while (level % 2 == 0 && level > 64) level /= 2;
  const double nu = 0.5 * prm.n - 1.0;
  const double bessel_zero = prm.n == 1 ? std::numbers::pi / 2.0 : boost::math::cyl_bessel_j_zero(nu, 1);
  const double amplitude = std::pow(1.5 * bessel_zero * bessel_zero, 1.0 / (prm.p - 1.0));
  Eigen::VectorXd u(level);
  for (int j = 0; j < level; ++j) u[j] = amplitude * std::cos(0.5 * std::numbers::pi * j / level);
  u = detail::newton(prm, u, 1.0 / level);
  while (level < intervals) {
    level *= 2;
    u = detail::newton(prm, detail::refine(u), 1.0 / level);
  }
  return u;
}

/// Lowest `count` eigenvalues of -(scheme + pU^{p-1}) in angular mode ℓ, via a dense symmetric
/// eigensolve of the diagonally symmetrized matrix.
inline Eigen::VectorXd dense_mode_eigenvalues(const ProblemParams& prm, const Eigen::VectorXd& u, int mode, int count) {
  const Eigen::Index N = u.size();
  const double h = 1.0 / double(N);
  const int first = mode == 0 ? 0 : 1;
  const Eigen::Index size = N - first;
  const double angular = double(mode) * double(mode + prm.n - 2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index k = 0; k < size; ++k) {
    const Eigen::Index j = first + k;
    const auto s = detail::stencil(prm.n, int(j), h);
    a(k, k) = -s.diag - prm.p * detail::pos_pow(u[j], prm.p - 1.0) + (j > 0 ? angular / std::pow(j * h, 2) : 0.0);
    if (k + 1 < size) {
      const double up = -s.plus;
      const double down = -detail::stencil(prm.n, int(j + 1), h).minus;
      const double prod = up * down;
      require(prod >= 0.0, ErrorKind::InvalidArgument, "oracle scheme is not symmetrizable");
      a(k, k + 1) = a(k + 1, k) = -std::sqrt(prod);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::NonConvergence, "dense eigensolver failed");
  return es.eigenvalues().head(std::min<Eigen::Index>(count, size));
}

/// Reference quantities on one grid.
inline RadialReference reference_on_grid(const ProblemParams& prm, int intervals) {
  const Eigen::VectorXd u = dense_ground_state(prm, intervals);
  const double h = 1.0 / intervals;
  const Eigen::Index N = u.size();
  RadialReference out;
  out.intervals = intervals;
  out.center = u[0];
  out.boundary_slope = (-4.0 * u[N - 1] + u[N - 2]) / (2.0 * h);
  const Eigen::VectorXd radial = dense_mode_eigenvalues(prm, u, 0, 2);
  const Eigen::VectorXd angular = dense_mode_eigenvalues(prm, u, 1, 1);
  out.mu0 = radial[0];
  out.mu1 = std::min(radial[1], angular[0]);
  return out;
}

/// Richardson extrapolation (second order) from `intervals`/2 and `intervals`.
inline RadialReference extrapolated_reference(const ProblemParams& prm, int intervals) {
  const auto coarse = reference_on_grid(prm, intervals / 2);
  const auto fine = reference_on_grid(prm, intervals);
  const auto extrap = [](double c, double f) { return (4.0 * f - c) / 3.0; };
  RadialReference out;
  out.intervals = intervals;
  out.center = extrap(coarse.center, fine.center);
  out.boundary_slope = extrap(coarse.boundary_slope, fine.boundary_slope);
  out.mu0 = extrap(coarse.mu0, fine.mu0);
  out.mu1 = extrap(coarse.mu1, fine.mu1);
  return out;
}

}  // namespace tubesol::oracle

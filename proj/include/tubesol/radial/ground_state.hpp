#pragma once

// Positive radial solution of U'' + (n-1)/r U' + U^p = 0 on [0,1], U'(0) = 0, U(1) = 0.

#include <math.h>  // pchip.hpp calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/params.hpp"
#include "tubesol/core/tridiagonal.hpp"
#include "tubesol/radial/grid.hpp"

namespace tubesol::radial {

struct ShootingBracket {
  double low = 0.0;           ///< height with U(1; s) > 0
  double high = 0.0;          ///< height where U reaches 0 before r = 1
  double value_low = 0.0;
  double value_high = 0.0;
  int iterations = 0;
};

/// Ground state on a uniform grid with its interpolant.
class RadialProfile {
 public:
  RadialProfile(ProblemParams params, Eigen::VectorXd values, double residual, ShootingBracket bracket)
      : params_(params), grid_(params.n, int(values.size()) - 1), values_(std::move(values)),
        residual_(residual), bracket_(bracket) {
    const double h = grid_.spacing();
    const Eigen::Index N = values_.size() - 1;
    boundary_slope_ = (3.0 * values_[N] - 4.0 * values_[N - 1] + values_[N - 2]) / (2.0 * h);
    std::vector<double> x(grid_.nodes().data(), grid_.nodes().data() + N + 1);
    std::vector<double> y(values_.data(), values_.data() + N + 1);
    interp_ = std::make_shared<const Pchip>(std::move(x), std::move(y), 0.0, boundary_slope_);
  }

  const ProblemParams& params() const { return params_; }
  const RadialGrid& grid() const { return grid_; }
  const Eigen::VectorXd& nodes() const { return grid_.nodes(); }
  const Eigen::VectorXd& values() const { return values_; }
  int intervals() const { return grid_.intervals(); }
  double center_value() const { return values_[0]; }
  /// One-sided second-order estimate of U'(1).
  double boundary_slope() const { return boundary_slope_; }
  /// max over interior nodes of |Δ_h U + U^p|.
  double residual() const { return residual_; }
  const ShootingBracket& bracket() const { return bracket_; }

  /// Monotone cubic interpolation of U at r ∈ [0,1].
  double operator()(double r) const {
    if (r >= 1.0) return 0.0;
    if (r <= 0.0) return values_[0];
    return std::max(0.0, (*interp_)(r));
  }
  double derivative(double r) const {
    r = std::clamp(r, 0.0, 1.0);
    return interp_->prime(r);
  }

 private:
  using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
  ProblemParams params_;
  RadialGrid grid_;
  Eigen::VectorXd values_;
  double residual_ = 0.0;
  ShootingBracket bracket_;
  double boundary_slope_ = 0.0;
  std::shared_ptr<const Pchip> interp_;
};

namespace detail {

inline double positive_power(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

/// RK4 integration of the radial ODE from U(0)=s, U'(0)=0 on the grid nodes.
/// Returns U(1) if U stays positive, otherwise minus the unreached fraction of [0,1].
inline double shoot(const ProblemParams& prm, double s, int intervals, Eigen::VectorXd* trajectory = nullptr,
                    int substeps = 4) {
  const double h = 1.0 / (double(intervals) * substeps);
  const double n = prm.n;
  const auto accel = [&](double r, double u, double v) {
    if (r == 0.0) return -positive_power(u, prm.p) / n;
    return -(n - 1.0) / r * v - positive_power(u, prm.p);
  };
  double u = s, v = 0.0;
  if (trajectory) {
    trajectory->resize(intervals + 1);
    (*trajectory)[0] = s;
  }
  for (int step = 0; step < intervals * substeps; ++step) {
    const double r = step * h;
    const double k1u = v, k1v = accel(r, u, v);
    const double k2u = v + 0.5 * h * k1v, k2v = accel(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    const double k3u = v + 0.5 * h * k2v, k3v = accel(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    const double k4u = v + h * k3v, k4v = accel(r + h, u + h * k3u, v + h * k3v);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (trajectory && (step + 1) % substeps == 0) (*trajectory)[(step + 1) / substeps] = u;
    if (u <= 0.0 && step + 1 < intervals * substeps) return -(1.0 - (step + 1) * h);
  }
  return u;
}

}  // namespace detail

/// Value of the shooting function U(1; s) (negative once U vanishes before r = 1).
inline double shooting_boundary_value(const ProblemParams& params, double s, int grid_size) {
  return detail::shoot(params, s, grid_size);
}

/// Shooting on U(0) followed by Newton polish of the discrete equations on grid_size intervals.
inline RadialProfile solve_ground_state(const ProblemParams& params, double tol, int grid_size) {
  params.validate();
  if (params.n >= 3 && !params.subcritical()) {
    std::ostringstream msg;
    msg << "p = " << params.p << " >= (n+2)/(n-2) = " << params.critical_exponent() << " for n = " << params.n;
    fail(ErrorKind::SupercriticalExponent, msg.str());
  }
  require(tol > 0.0, ErrorKind::InvalidArgument, "tolerance must be positive");
  require(grid_size >= 64, ErrorKind::InvalidArgument, "grid_size must be >= 64");

  ShootingBracket br;
  br.low = 0.1;
  br.value_low = detail::shoot(params, br.low, grid_size);
  for (int k = 0; br.value_low <= 0.0; ++k) {
    require(k < 60, ErrorKind::NonConvergence, "no positive shooting value below 0.1");
    br.low *= 0.5;
    br.value_low = detail::shoot(params, br.low, grid_size);
  }
  br.high = 1.0;
  br.value_high = detail::shoot(params, br.high, grid_size);
  for (int k = 0; br.value_high > 0.0; ++k) {
    require(k < 80, ErrorKind::NonConvergence, "shooting bracket not found");
    br.high *= 2.0;
    br.value_high = detail::shoot(params, br.high, grid_size);
  }
  while (br.high - br.low > 1e-13 * br.high && br.iterations < 200) {
    const double mid = 0.5 * (br.low + br.high);
    const double f = detail::shoot(params, mid, grid_size);
    (f > 0.0 ? br.low : br.high) = mid;
    (f > 0.0 ? br.value_low : br.value_high) = f;
    ++br.iterations;
  }

  Eigen::VectorXd u;
  detail::shoot(params, br.low, grid_size, &u);
  u[grid_size] = 0.0;
  u = u.cwiseMax(0.0);

  // Newton on F_j = (Δ_h u)_j + u_j^p, j = 0..N-1.
  const RadialGrid grid(params.n, grid_size);
  const auto& vol = grid.volumes();
  const auto& flux = grid.fluxes();
  const auto residual_of = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd f = grid.laplacian(x);
    for (int j = 0; j < grid_size; ++j) f[j] += detail::positive_power(x[j], params.p);
    return f;
  };
  Eigen::VectorXd f = residual_of(u);
  double res = f.cwiseAbs().maxCoeff();
  for (int it = 0; it < 50 && res > 0.1 * tol; ++it) {
    Eigen::VectorXd lower(grid_size - 1), diag(grid_size), upper(grid_size - 1);
    for (int j = 0; j < grid_size; ++j) {
      double d = -flux[j];
      if (j > 0) d -= flux[j - 1];
      diag[j] = d / vol[j] + params.p * detail::positive_power(u[j], params.p - 1.0);
      if (j + 1 < grid_size) upper[j] = flux[j] / vol[j];
      if (j > 0) lower[j - 1] = flux[j - 1] / vol[j];
    }
    const linalg::TridiagonalLU lu(lower, diag, upper);
    require(!lu.singular(), ErrorKind::NonConvergence, "singular Newton Jacobian in ground-state polish");
    const Eigen::VectorXd step = lu.solve(-f);
    Eigen::VectorXd next = u;
    next.head(grid_size) += step;
    const Eigen::VectorXd fn = residual_of(next);
    const double rn = fn.cwiseAbs().maxCoeff();
    if (!(rn < res)) break;  // roundoff floor
    u = std::move(next);
    f = fn;
    res = rn;
  }
  if (!(u.head(grid_size).minCoeff() > 0.0)) fail(ErrorKind::NonConvergence, "ground state lost positivity");
  return RadialProfile(params, std::move(u), res, br);
}

/// ε^{-2/(p-1)} U(dist/ε): the rescaled profile at distance `dist` from the core.
inline double evaluate_ubar(const RadialProfile& profile, double eps, double dist) {
  require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
  require(dist >= 0.0, ErrorKind::InvalidArgument, "distance must be non-negative");
  if (dist > eps) {
    std::ostringstream msg;
    msg << "distance " << dist << " exceeds tube radius " << eps;
    fail(ErrorKind::OutOfTube, msg.str());
  }
  if (dist == eps) return 0.0;
  return std::pow(eps, profile.params().amplitude_exponent()) * profile(dist / eps);
}

}  // namespace tubesol::radial

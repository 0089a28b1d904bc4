#pragma once

// Closed curves in ℝ^m sampled uniformly in a periodic parameter, with a smooth periodic
// orthonormal frame of the normal bundle.

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/spectral.hpp"

namespace tubesol::manifold {

class EmbeddedCurve {
 public:
  EmbeddedCurve() = default;

  int ambient_dim() const { return int(points_.cols()); }
  int normal_dim() const { return ambient_dim() - 1; }
  int samples() const { return int(points_.rows()); }
  double period() const { return period_; }
  double parameter(int j) const { return period_ * j / samples(); }
  double holonomy_angle() const { return holonomy_angle_; }

  /// Rows are Y(t_j).
  const Eigen::MatrixXd& points() const { return points_; }
  /// Rows are Y'(t_j), Y''(t_j).
  const Eigen::MatrixXd& velocity() const { return velocity_; }
  const Eigen::MatrixXd& acceleration() const { return acceleration_; }
  /// normal(i) has rows e^{i+1}(t_j).
  const Eigen::MatrixXd& normal(int i) const { return normals_.at(i); }
  /// Rows are ∂_t e^{i+1}(t_j), by spectral differentiation.
  const Eigen::MatrixXd& normal_derivative(int i) const { return normal_derivatives_.at(i); }

  double length() const {
    return velocity_.rowwise().norm().sum() * period_ / samples();
  }

  friend EmbeddedCurve build_frame(const Eigen::MatrixXd&, double, int);
  friend EmbeddedCurve straight_curve(double, int, int);

 private:
  double period_ = 0.0;
  double holonomy_angle_ = 0.0;
  Eigen::MatrixXd points_;
  Eigen::MatrixXd velocity_;
  Eigen::MatrixXd acceleration_;
  std::vector<Eigen::MatrixXd> normals_;
  std::vector<Eigen::MatrixXd> normal_derivatives_;
};

namespace detail {

inline Eigen::VectorXd reflect(const Eigen::VectorXd& v, const Eigen::VectorXd& axis, double axis_sq) {
  return v - (2.0 / axis_sq) * axis.dot(v) * axis;
}

// Orthonormal basis of the complement of `tangent`, starting from `first` when given.
inline Eigen::MatrixXd complete_normal_basis(const Eigen::VectorXd& tangent, const Eigen::VectorXd& first) {
  const Eigen::Index m = tangent.size();
  Eigen::MatrixXd basis(m, m);
  basis.col(0) = tangent;
  Eigen::Index filled = 1;
  const auto try_add = [&](Eigen::VectorXd v) {
    for (Eigen::Index c = 0; c < filled; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    const double norm = v.norm();
    if (norm > 1e-6 && filled < m) basis.col(filled++) = v / norm;
  };
  if (first.size() == m) try_add(first);
  for (Eigen::Index a = 0; a < m && filled < m; ++a) try_add(Eigen::VectorXd::Unit(m, a));
  return basis.rightCols(m - 1);
}

// Gram–Schmidt of the columns of `basis` against `tangent` and each other, in order.
inline void reorthonormalize(const Eigen::VectorXd& tangent, Eigen::MatrixXd& basis) {
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    Eigen::VectorXd v = basis.col(i);
    v -= tangent.dot(v) * tangent;
    for (Eigen::Index c = 0; c < i; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    basis.col(i) = v.normalized();
  }
}

}  // namespace detail

/// Frame for uniformly spaced samples of a closed curve over one period (rows = points, no
/// repeated endpoint; a repeated endpoint is dropped). `normal_dim` must equal m - 1.
inline EmbeddedCurve build_frame(const Eigen::MatrixXd& samples_in, double period, int m) {
  require(m >= 2, ErrorKind::InvalidArgument, "ambient dimension must be >= 2");
  require(samples_in.cols() == m, ErrorKind::InvalidArgument, "sample width differs from m");
  require(period > 0.0, ErrorKind::InvalidArgument, "period must be positive");
  Eigen::MatrixXd pts = samples_in;
  Eigen::Index N = pts.rows();
  require(N >= 8, ErrorKind::InvalidArgument, "need at least 8 curve samples");

  double max_step = 0.0;
  for (Eigen::Index j = 0; j + 1 < N; ++j) max_step = std::max(max_step, (pts.row(j + 1) - pts.row(j)).norm());
  double gap = (pts.row(0) - pts.row(N - 1)).norm();
  if (gap <= 1e-12 * std::max(1.0, max_step * N)) {
    pts.conservativeResize(N - 1, Eigen::NoChange);
    --N;
    gap = (pts.row(0) - pts.row(N - 1)).norm();
  }
  if (gap > 2.5 * max_step) {
    std::ostringstream msg;
    msg << "end-to-start gap " << gap << " exceeds sample spacing " << max_step;
    fail(ErrorKind::NonClosedCurve, msg.str());
  }

  EmbeddedCurve c;
  c.period_ = period;
  c.points_ = pts;
  c.velocity_ = spectral::differentiate_rows(pts, period, 1);
  c.acceleration_ = spectral::differentiate_rows(pts, period, 2);
  const Eigen::VectorXd speed = c.velocity_.rowwise().norm();
  const double mean_speed = speed.mean();
  for (Eigen::Index j = 0; j < N; ++j)
    if (!(speed[j] > 1e-8 * std::max(mean_speed, 1e-300))) {
      std::ostringstream msg;
      msg << "|Y'| = " << speed[j] << " at sample " << j;
      fail(ErrorKind::DegenerateTangent, msg.str());
    }

  const int n = m - 1;
  std::vector<Eigen::MatrixXd> frame(n, Eigen::MatrixXd(N, m));
  const auto tangent = [&](Eigen::Index j) -> Eigen::VectorXd { return c.velocity_.row(j).transpose() / speed[j]; };

  if (m == 2) {
    // e¹ = T rotated by -90°: the outward normal of a counter-clockwise curve.
    for (Eigen::Index j = 0; j < N; ++j) {
      const Eigen::VectorXd t = tangent(j);
      frame[0](j, 0) = t[1];
      frame[0](j, 1) = -t[0];
    }
  } else {
    // Start with e¹ along minus the principal normal where curvature allows.
    const Eigen::VectorXd t0 = tangent(0);
    Eigen::VectorXd acc = c.acceleration_.row(0).transpose();
    acc -= t0.dot(acc) * t0;
    Eigen::VectorXd first;
    if (acc.norm() > 1e-8 * c.acceleration_.norm() / std::sqrt(double(N)) && acc.norm() > 0.0) first = -acc;
    Eigen::MatrixXd basis = detail::complete_normal_basis(t0, first);
    Eigen::MatrixXd start = basis;
    // Double-reflection transport around the loop.
    for (Eigen::Index j = 0; j < N; ++j) {
      for (int i = 0; i < n; ++i) frame[i].row(j) = basis.col(i).transpose();
      const Eigen::Index nx = (j + 1) % N;
      const Eigen::VectorXd v1 = (c.points_.row(nx) - c.points_.row(j)).transpose();
      const double c1 = v1.squaredNorm();
      const Eigen::VectorXd tl = detail::reflect(tangent(j), v1, c1);
      const Eigen::VectorXd v2 = tangent(nx) - tl;
      const double c2 = v2.squaredNorm();
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd r = detail::reflect(basis.col(i), v1, c1);
        if (c2 > 0.0) r = detail::reflect(r, v2, c2);
        basis.col(i) = r;
      }
      detail::reorthonormalize(tangent(nx), basis);
    }
    // basis now holds the transported frame back at t_0. Holonomy H: transported = start·H.
    const Eigen::MatrixXd holonomy = start.transpose() * basis;
    Eigen::MatrixXd log_h;
    if (n == 2) {
      const double angle = std::atan2(holonomy(1, 0), holonomy(0, 0));
      c.holonomy_angle_ = angle;
      log_h = Eigen::MatrixXd::Zero(2, 2);
      log_h(1, 0) = angle;
      log_h(0, 1) = -angle;
    } else if (n == 1) {
      log_h = Eigen::MatrixXd::Zero(1, 1);
    } else {
      log_h = holonomy.log();
      log_h = 0.5 * (log_h - log_h.transpose()).eval();
      c.holonomy_angle_ = std::sqrt(0.5 * log_h.squaredNorm());
    }
    // Undo the holonomy with a uniform rotation rate.
    for (Eigen::Index j = 0; j < N; ++j) {
      const Eigen::MatrixXd undo = (-(double(j) / double(N)) * log_h).exp();
      Eigen::MatrixXd f(m, n);
      for (int i = 0; i < n; ++i) f.col(i) = frame[i].row(j).transpose();
      const Eigen::MatrixXd g = f * undo;
      for (int i = 0; i < n; ++i) frame[i].row(j) = g.col(i).transpose();
    }
  }
  c.normals_ = std::move(frame);
  c.normal_derivatives_.clear();
  for (int i = 0; i < n; ++i) c.normal_derivatives_.push_back(spectral::differentiate_rows(c.normals_[i], period, 1));
  return c;
}

/// Arclength-parametrized circle of radius R in the (x1,x2)-plane of ℝ^m, counter-clockwise.
inline Eigen::MatrixXd circle_samples(double radius, int m, int samples) {
  require(radius > 0.0, ErrorKind::InvalidArgument, "radius must be positive");
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(samples, m);
  for (int j = 0; j < samples; ++j) {
    const double s = 2.0 * std::numbers::pi * j / samples;
    pts(j, 0) = radius * std::cos(s);
    pts(j, 1) = radius * std::sin(s);
  }
  return pts;
}

inline EmbeddedCurve circle_curve(double radius, int m, int samples) {
  return build_frame(circle_samples(radius, m, samples), 2.0 * std::numbers::pi * radius, m);
}

/// Straight periodic line of the given length along x1 (the flat control geometry).
inline EmbeddedCurve straight_curve(double length, int m, int samples) {
  // The line t ↦ (t, 0, …) with t identified modulo `length`; the constant frame is set directly.
  require(length > 0.0 && samples >= 8 && m >= 2, ErrorKind::InvalidArgument, "invalid straight curve");
  EmbeddedCurve c;
  c.period_ = length;
  c.points_ = Eigen::MatrixXd::Zero(samples, m);
  for (int j = 0; j < samples; ++j) c.points_(j, 0) = length * j / samples;
  c.velocity_ = Eigen::MatrixXd::Zero(samples, m);
  c.velocity_.col(0).setOnes();
  c.acceleration_ = Eigen::MatrixXd::Zero(samples, m);
  for (int i = 0; i < m - 1; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(samples, m);
    e.col(i + 1).setOnes();
    c.normals_.push_back(e);
    c.normal_derivatives_.push_back(Eigen::MatrixXd::Zero(samples, m));
  }
  return c;
}

}  // namespace tubesol::manifold

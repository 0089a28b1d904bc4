#pragma once

// Metric of the tube in Fermi coordinates x = Y(t) + Σ z_i e^i(t) about a closed curve:
//   g_tt = |Y'|² + z·h + zᵀ k z,   g_{t z_j} = (ℓᵀ z)_j,   g_{z z} = I,
// with h^i = 2 Y'·∂_t e^i, k^{ij} = ∂_t e^i·∂_t e^j, ℓ^i_j = ∂_t e^i·e^j.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/fermi/grid.hpp"
#include "tubesol/manifold/curve.hpp"

namespace tubesol::fermi {

/// Below this value of det g / det ḡ the tube is reported too wide.
inline constexpr double kMinVolumeRatio = 1e-10;

/// Frame tensors and their t-derivatives at the curve samples.
struct FrameTensors {
  int normal_dim = 1;
  double period = 0.0;
  Eigen::VectorXd speed, speed_dt;           ///< |Y'| and its derivative
  Eigen::MatrixXd h, h_dt;                   ///< n_t × n
  std::vector<Eigen::MatrixXd> k, k_dt;      ///< per sample, n × n
  std::vector<Eigen::MatrixXd> ell, ell_dt;  ///< per sample, n × n; ell(i,j) = ∂_t e^i · e^j

  int samples() const { return int(speed.size()); }
};

inline FrameTensors frame_tensors(const manifold::EmbeddedCurve& curve) {
  const int n = curve.normal_dim();
  const int N = curve.samples();
  FrameTensors ft;
  ft.normal_dim = n;
  ft.period = curve.period();
  ft.speed = curve.velocity().rowwise().norm();
  ft.h.resize(N, n);
  Eigen::MatrixXd k_flat(N, n * n), ell_flat(N, n * n);
  for (int j = 0; j < N; ++j)
    for (int a = 0; a < n; ++a) {
      ft.h(j, a) = 2.0 * curve.velocity().row(j).dot(curve.normal_derivative(a).row(j));
      for (int b = 0; b < n; ++b) {
        k_flat(j, a * n + b) = curve.normal_derivative(a).row(j).dot(curve.normal_derivative(b).row(j));
        ell_flat(j, a * n + b) = curve.normal_derivative(a).row(j).dot(curve.normal(b).row(j));
      }
    }
  // An exactly constant field (straight tube) keeps exact zero derivatives.
  const auto deriv = [&](const Eigen::MatrixXd& f) {
    Eigen::MatrixXd d = spectral::differentiate_rows(f, ft.period, 1);
    for (Eigen::Index c = 0; c < f.cols(); ++c)
      if ((f.col(c).array() == f(0, c)).all()) d.col(c).setZero();
    return d;
  };
  Eigen::MatrixXd speed_m = ft.speed;
  ft.speed_dt = deriv(speed_m).col(0);
  ft.h_dt = deriv(ft.h);
  const Eigen::MatrixXd k_dt = deriv(k_flat), ell_dt = deriv(ell_flat);
  const auto unflat = [n](const Eigen::MatrixXd& flat, int j) {
    Eigen::MatrixXd m(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) m(a, b) = flat(j, a * n + b);
    return m;
  };
  for (int j = 0; j < N; ++j) {
    ft.k.push_back(unflat(k_flat, j));
    ft.k_dt.push_back(unflat(k_dt, j));
    ft.ell.push_back(unflat(ell_flat, j));
    ft.ell_dt.push_back(unflat(ell_dt, j));
  }
  return ft;
}

/// Constant speed and vanishing frame tensors: the tube is a straight cylinder.
inline bool is_straight(const FrameTensors& ft) {
  const auto zero = [](const Eigen::MatrixXd& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; };
  return (ft.speed.array() == ft.speed[0]).all() && zero(ft.h) && std::all_of(ft.k.begin(), ft.k.end(), zero) &&
         std::all_of(ft.ell.begin(), ft.ell.end(), zero);
}

/// Metric, inverse metric and first-order Laplacian coefficients at one point (t_j, z):
/// Δu = g^{ab} ∂_a∂_b u + drift^a ∂_a u.
struct PointMetric {
  double g_tt = 0.0;
  Eigen::VectorXd g_tz;
  double det = 0.0;        ///< det g
  double base_det = 0.0;   ///< det ḡ = |Y'|²
  double inv_tt = 0.0;
  Eigen::VectorXd inv_tz;
  Eigen::MatrixXd inv_zz;
  double drift_t = 0.0;
  Eigen::VectorXd drift_z;

  double sqrt_det() const { return std::sqrt(det); }
  /// a = √det g / √det ḡ.
  double volume_factor() const { return std::sqrt(det / base_det); }
  Eigen::MatrixXd full() const {
    const Eigen::Index n = g_tz.size();
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n + 1, n + 1);
    g(0, 0) = g_tt;
    g.block(1, 0, n, 1) = g_tz;
    g.block(0, 1, 1, n) = g_tz.transpose();
    return g;
  }
};

/// Returns false (leaving `out` partially filled) where the metric degenerates.
inline bool point_metric(const FrameTensors& ft, int j, const Eigen::VectorXd& z, PointMetric& out) {
  const int n = ft.normal_dim;
  const double S = ft.speed[j], St = ft.speed_dt[j];
  const Eigen::VectorXd h = ft.h.row(j).transpose(), ht = ft.h_dt.row(j).transpose();
  const Eigen::MatrixXd& k = ft.k[j];
  const Eigen::MatrixXd& kt = ft.k_dt[j];
  const Eigen::MatrixXd& l = ft.ell[j];
  const Eigen::MatrixXd& lt = ft.ell_dt[j];

  const double G = S * S + z.dot(h) + z.dot(k * z);
  const double Gt = 2.0 * S * St + z.dot(ht) + z.dot(kt * z);
  const Eigen::VectorXd Gz = h + (k + k.transpose()) * z;
  const Eigen::VectorXd w = l.transpose() * z;
  const Eigen::VectorXd wt = lt.transpose() * z;
  const double s = G - w.squaredNorm();
  const double beta = 1.0 + z.dot(h) / (2.0 * S * S);
  out.g_tt = G;
  out.g_tz = w;
  out.det = s;
  out.base_det = S * S;
  if (!(s / (S * S) >= kMinVolumeRatio) || !(beta > 0.0)) return false;

  const double st = Gt - 2.0 * w.dot(wt);
  const Eigen::VectorXd sz = Gz - 2.0 * l * w;
  const double Lt = st / (2.0 * s);
  const Eigen::VectorXd Lz = sz / (2.0 * s);
  out.inv_tt = 1.0 / s;
  out.inv_tz = -w / s;
  out.inv_zz = Eigen::MatrixXd::Identity(n, n) + w * w.transpose() / s;

  // drift^a = ∂_b g^{ba} + g^{ab} ∂_b log √det g
  double div_t = -st / (s * s);
  for (int b = 0; b < n; ++b) div_t += -l(b, b) / s + w[b] * sz[b] / (s * s);
  out.drift_t = div_t + out.inv_tt * Lt + out.inv_tz.dot(Lz);
  out.drift_z.resize(n);
  for (int i = 0; i < n; ++i) {
    double div = -wt[i] / s + w[i] * st / (s * s);
    for (int b = 0; b < n; ++b) div += (l(b, b) * w[i] + w[b] * l(b, i)) / s - w[b] * w[i] * sz[b] / (s * s);
    out.drift_z[i] = div + out.inv_tz[i] * Lt + out.inv_zz.row(i).dot(Lz);
  }
  return true;
}

/// Tube geometry sampled on (curve samples) × (fiber box grid).
class FermiExpansion {
 public:
  const manifold::EmbeddedCurve& curve() const { return curve_; }
  const FiberGrid& fiber() const { return fiber_; }
  const FrameTensors& tensors() const { return tensors_; }
  int t_samples() const { return tensors_.samples(); }
  double period() const { return tensors_.period; }

  /// PointMetric at grid node (t_j, fiber point q).
  const PointMetric& at(int j, Eigen::Index q) const { return nodes_[std::size_t(j) * fiber_.size() + q]; }
  /// Full (n+1)×(n+1) metric in (t, z) coordinates.
  Eigen::MatrixXd metric(int j, Eigen::Index q) const { return at(j, q).full(); }
  /// a(t_j, z_q).
  const Eigen::MatrixXd& volume_factor() const { return volume_; }
  /// max over z ≠ 0 of |a - 1| / |z|.
  double volume_slope() const { return volume_slope_; }

  friend FermiExpansion metric_expansion(const manifold::EmbeddedCurve&, const FiberGrid&);

 private:
  manifold::EmbeddedCurve curve_;
  FiberGrid fiber_;
  FrameTensors tensors_;
  std::vector<PointMetric> nodes_;
  Eigen::MatrixXd volume_;
  double volume_slope_ = 0.0;
};

inline FermiExpansion metric_expansion(const manifold::EmbeddedCurve& curve, const FiberGrid& fiber) {
  require(fiber.dim() == curve.normal_dim(), ErrorKind::GridMismatch, "fiber grid dimension differs from m - 1");
  FermiExpansion e;
  e.curve_ = curve;
  e.fiber_ = fiber;
  e.tensors_ = frame_tensors(curve);
  const int N = e.tensors_.samples();
  e.nodes_.resize(std::size_t(N) * fiber.size());
  e.volume_.resize(N, fiber.size());
  for (int j = 0; j < N; ++j)
    for (Eigen::Index q = 0; q < fiber.size(); ++q) {
      const Eigen::VectorXd z = fiber.point(q);
      PointMetric& pm = e.nodes_[std::size_t(j) * fiber.size() + q];
      if (!point_metric(e.tensors_, j, z, pm)) {
        std::ostringstream msg;
        msg << "metric degenerates at t = " << curve.parameter(j) << ", |z| = " << z.norm()
            << " (det g/det ḡ = " << pm.det / pm.base_det << ")";
        fail(ErrorKind::TubeTooWide, msg.str());
      }
      e.volume_(j, q) = pm.volume_factor();
      const double r = z.norm();
      if (r > 0.0) e.volume_slope_ = std::max(e.volume_slope_, std::abs(e.volume_(j, q) - 1.0) / r);
    }
  return e;
}

}  // namespace tubesol::fermi

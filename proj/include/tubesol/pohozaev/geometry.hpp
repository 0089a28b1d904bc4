#pragma once

// φ = dist(·,Λ)²/2 = |z|²/2 in Fermi coordinates about a closed curve. With
// β = 1 + z·h/(2|Y'|²) one has det g = |Y'|²β², ∇φ = z ∂_z and
//   Δφ = n + 1 − 1/β,   ∇²φ = I − T̂T̂ᵀ/β   (T̂ the unit tangent of Λ),
// so Δφ − n and ∇Δφ = ∇β/β² are explicit in the frame tensors.

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tubesol/core/error.hpp"
#include "tubesol/fermi/expansion.hpp"
#include "tubesol/manifold/curve.hpp"
#include "tubesol/tube/grid.hpp"

namespace tubesol::pohozaev {

/// Geometry at one point (t-sample, z).
struct FermiPoint {
  double speed = 1.0;
  double beta = 1.0;
  double beta_t = 0.0;
  Eigen::VectorXd beta_z;
  Eigen::VectorXd twist;  ///< g_tz = ℓᵀz
  double det = 1.0;       ///< det g

  double laplacian_phi(int n) const { return n + 1.0 - 1.0 / beta; }
  /// ∂_t u − twist·∂_z u, the combination entering every tangential term.
  double tangential(double du_t, const Eigen::VectorXd& du_z) const { return du_t - twist.dot(du_z); }
  double gradient_sq(double du_t, const Eigen::VectorXd& du_z) const {
    const double d = tangential(du_t, du_z);
    return d * d / det + du_z.squaredNorm();
  }
  /// ∇²φ(∇u, ∇u).
  double hessian_phi(double du_t, const Eigen::VectorXd& du_z) const {
    const double d = tangential(du_t, du_z);
    return gradient_sq(du_t, du_z) - d * d / (beta * det);
  }
  /// ∇Δφ·∇u.
  double laplacian_phi_slope(double du_t, const Eigen::VectorXd& du_z) const {
    return ((beta_t - twist.dot(beta_z)) * tangential(du_t, du_z) / det + beta_z.dot(du_z)) / (beta * beta);
  }
  /// |∇Δφ|.
  double laplacian_phi_gradient() const {
    const double d = beta_t - twist.dot(beta_z);
    return std::sqrt(d * d / det + beta_z.squaredNorm()) / (beta * beta);
  }
};

inline FermiPoint fermi_point(const fermi::FrameTensors& ft, int i, const Eigen::VectorXd& z) {
  FermiPoint pt;
  const double S = ft.speed[i], St = ft.speed_dt[i];
  const Eigen::VectorXd h = ft.h.row(i).transpose(), ht = ft.h_dt.row(i).transpose();
  pt.speed = S;
  pt.beta = 1.0 + z.dot(h) / (2.0 * S * S);
  pt.beta_z = h / (2.0 * S * S);
  pt.beta_t = z.dot(ht / (2.0 * S * S) - h * St / (S * S * S));
  pt.twist = ft.ell[i].transpose() * z;
  pt.det = S * S + z.dot(h) + z.dot(ft.k[i] * z) - pt.twist.squaredNorm();
  if (!(pt.beta > 0.0) || !(pt.det / (S * S) >= fermi::kMinVolumeRatio)) {
    std::ostringstream msg;
    msg << "Fermi chart degenerates at sample " << i << ", |z| = " << z.norm();
    fail(ErrorKind::TubeTooWide, msg.str());
  }
  return pt;
}

/// Measured constants of the three geometric estimates on B_ε(Λ), plus the volume spread.
struct GeometricBounds {
  double laplacian_defect = 0.0;   ///< sup|Δφ − n|/ε
  double laplacian_gradient = 0.0;  ///< sup|∇Δφ|
  /// sup of the negative part of ((1/n)Δφ|ξ|² − ∇²φ(ξ,ξ))/(ε|ξ|²). The two-sided quotient is O(1/ε)
  /// for tangential ξ, where the form equals |ξ|²(1/n + (1 − 1/n)/β) > 0.
  double hessian_defect = 0.0;
  double volume_spread = 1.0;  ///< max β / min β, the ratio of √det g/√det ḡ over the tube
};

/// Sup over the t-samples and a box grid of |z| ≤ ε (plus the extremal points ±ε h/|h|).
inline GeometricBounds measure_geometry(const fermi::FrameTensors& ft, double eps, int intervals = 8) {
  require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
  const int n = ft.normal_dim;
  const fermi::FiberGrid box = fermi::FiberGrid::box(n, eps, intervals);
  GeometricBounds out;
  double beta_min = std::numeric_limits<double>::infinity(), beta_max = 0.0;
  const auto visit = [&](int i, const Eigen::VectorXd& z) {
    const FermiPoint pt = fermi_point(ft, i, z);
    const double defect = 1.0 - 1.0 / pt.beta;  // Δφ − n
    out.laplacian_defect = std::max(out.laplacian_defect, std::abs(defect) / eps);
    out.laplacian_gradient = std::max(out.laplacian_gradient, pt.laplacian_phi_gradient());
    out.hessian_defect = std::max(out.hessian_defect, std::max(0.0, -defect / n) / eps);
    beta_min = std::min(beta_min, pt.beta);
    beta_max = std::max(beta_max, pt.beta);
  };
  for (int i = 0; i < ft.samples(); ++i) {
    for (Eigen::Index q = 0; q < box.size(); ++q) {
      const Eigen::VectorXd z = box.point(q);
      if (z.norm() <= eps * (1.0 + 1e-12)) visit(i, z);
    }
    const Eigen::VectorXd h = ft.h.row(i).transpose();
    if (h.norm() > 0.0) {
      visit(i, eps * h / h.norm());
      visit(i, -eps * h / h.norm());
    }
  }
  out.volume_spread = beta_max / beta_min;
  return out;
}

/// First Dirichlet eigenvalue of −Δ on the unit n-ball, j²_{n/2−1,1}.
inline double ball_dirichlet_eigenvalue(int n) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (n == 1) return std::numbers::pi * std::numbers::pi / 4.0;
  const double j = boost::math::cyl_bessel_j_zero(0.5 * n - 1.0, 1);
  return j * j;
}

/// Tube grid paired with the frame tensors of its core curve.
class TubeGeometry {
 public:
  TubeGeometry(tube::TubeGrid grid, fermi::FrameTensors tensors) : grid_(std::move(grid)), tensors_(std::move(tensors)) {
    if (tensors_.samples() != grid_.nt() || std::abs(tensors_.period - grid_.period()) > 1e-10 * grid_.period() ||
        tensors_.normal_dim != grid_.fiber_dim()) {
      std::ostringstream msg;
      msg << "curve has " << tensors_.samples() << " samples, period " << tensors_.period << " and codimension "
          << tensors_.normal_dim << "; grid expects " << grid_.nt() << ", " << grid_.period() << ", " << grid_.fiber_dim();
      fail(ErrorKind::GridMismatch, msg.str());
    }
    require(grid_.kind() == tube::FiberKind::Line || fermi::is_straight(tensors_), ErrorKind::UnsupportedGeometry,
            "radial fields need a straight tube");
  }

  const tube::TubeGrid& grid() const { return grid_; }
  const fermi::FrameTensors& tensors() const { return tensors_; }
  int fiber_dim() const { return grid_.fiber_dim(); }

  /// Geometry at t-sample i and rescaled fiber coordinate s (signed on the line, radius otherwise).
  FermiPoint at(int i, double s) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(fiber_dim());
    z[0] = grid_.eps() * s;
    return fermi_point(tensors_, i, z);
  }

  /// √det g times the fiber measure r^{n−1} (physical units), without the sphere area.
  double density(int i, double s) const {
    const FermiPoint pt = at(i, s);
    const double r = grid_.eps() * std::abs(s);
    return std::sqrt(pt.det) * (grid_.kind() == tube::FiberKind::Line ? 1.0 : std::pow(r, fiber_dim() - 1));
  }

 private:
  tube::TubeGrid grid_;
  fermi::FrameTensors tensors_;
};

inline TubeGeometry circle_geometry(const tube::TubeGrid& grid, double radius) {
  return TubeGeometry(grid, fermi::frame_tensors(manifold::circle_curve(radius, grid.fiber_dim() + 1, grid.nt())));
}

inline TubeGeometry straight_geometry(const tube::TubeGrid& grid) {
  return TubeGeometry(grid, fermi::frame_tensors(manifold::straight_curve(grid.period(), grid.fiber_dim() + 1, grid.nt())));
}

}  // namespace tubesol::pohozaev

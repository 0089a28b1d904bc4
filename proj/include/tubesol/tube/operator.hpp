#pragma once

// Conservative discretization of the Euclidean Laplacian in Fermi coordinates on the tube grid,
// together with the flat fiber Laplacian Δ_{g_z} of the product metric.
//
//   Δ_h v = (1/vol)·[ D_t(tcoef ∘ D_t v) + flux₊(v₊ − v) − flux₋(v − v₋) ]
//
// On the line fiber vol = A·εh and flux = A(z_{j+½})/(εh) with A = √det g; tcoef = vol/g_tt.
// D_t is the periodic spectral derivative, which is antisymmetric, so h_t·vol·Δ_h is symmetric.

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include "tubesol/core/error.hpp"
#include "tubesol/core/spectral.hpp"
#include "tubesol/fermi/expansion.hpp"
#include "tubesol/manifold/curve.hpp"
#include "tubesol/radial/grid.hpp"
#include "tubesol/tube/grid.hpp"

namespace tubesol::tube {

namespace detail {

/// Replaces rows by their mean when they agree to `rel`; returns whether they did.
inline bool flatten_rows(Eigen::MatrixXd& m, double rel = 1e-12) {
  const Eigen::RowVectorXd mean = m.colwise().mean();
  const double scale = std::max(mean.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((m.rowwise() - mean).cwiseAbs().maxCoeff() > rel * scale) return false;
  m.rowwise() = mean;
  return true;
}

inline bool rows_identical(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 1; i < m.rows(); ++i)
    if (!(m.row(i).array() == m.row(0).array()).all()) return false;
  return true;
}

}  // namespace detail

class TubeOperator {
 public:
  TubeOperator(const TubeGrid& grid, const fermi::FrameTensors& ft) : grid_(grid) {
    const int nt = grid.nt(), nodes = grid.nodes();
    if (ft.samples() != nt || std::abs(ft.period - grid.period()) > 1e-10 * grid.period()) {
      std::ostringstream msg;
      msg << "curve has " << ft.samples() << " samples and period " << ft.period << ", grid expects " << nt
          << " and " << grid.period();
      fail(ErrorKind::GridMismatch, msg.str());
    }
    require(ft.normal_dim == grid.fiber_dim(), ErrorKind::GridMismatch, "curve codimension differs from fiber dimension");
    const double eps = grid.eps(), h = grid.spacing();
    speed_ = ft.speed;
    vol_.resize(nt, nodes);
    tcoef_.resize(nt, nodes);
    flux_.resize(nt, nodes - 1);
    flat_vol_.resize(nodes);
    flat_flux_.resize(nodes - 1);

    if (grid.kind() == FiberKind::Line) {
      for (int i = 0; i < nt; ++i) {
        const double S = ft.speed[i], a = ft.h(i, 0), b = ft.k[i](0, 0);
        const auto metric = [&](double z) {
          const double G = S * S + z * a + z * z * b;
          const double beta = 1.0 + z * a / (2.0 * S * S);
          if (!(G / (S * S) >= fermi::kMinVolumeRatio) || !(beta > 0.0)) {
            std::ostringstream msg;
            msg << "Fermi chart degenerates at t=" << grid.t(i) << ", z=" << z << " (eps=" << eps << ")";
            fail(ErrorKind::TubeTooWide, msg.str());
          }
          return G;
        };
        for (int j = 0; j < nodes; ++j) {
          const double G = metric(grid.z(j));
          vol_(i, j) = std::sqrt(G) * eps * h;
          tcoef_(i, j) = vol_(i, j) / G;
        }
        for (int j = 0; j + 1 < nodes; ++j) flux_(i, j) = std::sqrt(metric(eps * (grid.s(j) + 0.5 * h))) / (eps * h);
      }
      flat_vol_.setConstant(eps * h);
      flat_flux_.setConstant(1.0 / (eps * h));
    } else {
      const bool straight = fermi::is_straight(ft);
      require(straight, ErrorKind::UnsupportedGeometry,
              "fiber-radial discretization requires a straight tube (curvature breaks radial symmetry)");
      const radial::RadialGrid rg(grid.fiber_dim(), grid.nz());
      const int n = grid.fiber_dim();
      flat_vol_ = std::pow(eps, n) * rg.volumes();
      flat_flux_ = std::pow(eps, n - 2) * rg.fluxes();
      const double S = ft.speed[0];
      for (int i = 0; i < nt; ++i) {
        vol_.row(i) = flat_vol_.transpose() * S;
        tcoef_.row(i) = vol_.row(i) / (S * S);
        flux_.row(i) = flat_flux_.transpose() * S;
      }
    }
    if (grid.kind() == FiberKind::Radial) {
      // Straight tubes: the product and Euclidean forms coincide.
      separable_ = true;
    } else {
      Eigen::MatrixXd speed_m = speed_;
      separable_ = detail::flatten_rows(speed_m) && detail::flatten_rows(vol_) && detail::flatten_rows(tcoef_) &&
                   detail::flatten_rows(flux_);
      if (separable_) speed_ = speed_m.col(0);
    }
    dt_ = spectral::derivative_matrix(nt, grid.period());
  }

  const TubeGrid& grid() const { return grid_; }
  /// Coefficients independent of t: the operator block-diagonalizes over Fourier modes.
  bool separable() const { return separable_; }
  const Eigen::VectorXd& speed() const { return speed_; }
  const Eigen::MatrixXd& volumes() const { return vol_; }
  const Eigen::MatrixXd& fluxes() const { return flux_; }
  const Eigen::MatrixXd& t_coefficients() const { return tcoef_; }
  const Eigen::VectorXd& flat_volumes() const { return flat_vol_; }
  const Eigen::VectorXd& flat_fluxes() const { return flat_flux_; }
  const Eigen::MatrixXd& t_derivative() const { return dt_; }

  /// Volume ratio a = dvol_{g∘}/dvol_ḡ at the nodes.
  Eigen::MatrixXd volume_ratio() const {
    Eigen::MatrixXd a(vol_.rows(), vol_.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      a.row(i) = vol_.row(i).cwiseQuotient(speed_[i] * flat_vol_.transpose());
    return a;
  }

  /// Tangential part (1/vol)·D_t(tcoef ∘ D_t v).
  TubeField t_part(const TubeField& v) const {
    check_field(grid_, v);
    TubeField out = grid_.zeros();
    if (separable_ && detail::rows_identical(v)) return out;
    const Eigen::MatrixXd dv = dt_ * v;
    const Eigen::MatrixXd flux_t = tcoef_.cwiseProduct(dv);
    out = (dt_ * flux_t).cwiseQuotient(vol_);
    zero_boundary(out);
    return out;
  }

  /// Fiber part of Δ_h (Euclidean metric).
  TubeField fiber_part(const TubeField& v) const {
    check_field(grid_, v);
    TubeField out = grid_.zeros();
    for (int j = grid_.first_free(); j <= grid_.last_free(); ++j) {
      Eigen::VectorXd acc = flux_.col(j).cwiseProduct(v.col(j + 1) - v.col(j));
      if (j > 0) acc -= flux_.col(j - 1).cwiseProduct(v.col(j) - v.col(j - 1));
      out.col(j) = acc.cwiseQuotient(vol_.col(j));
    }
    return out;
  }

  /// Δ_{g_z} on each fiber (product metric).
  TubeField flat_fiber_part(const TubeField& v) const {
    check_field(grid_, v);
    TubeField out = grid_.zeros();
    for (int j = grid_.first_free(); j <= grid_.last_free(); ++j) {
      Eigen::VectorXd acc = flat_flux_[j] * (v.col(j + 1) - v.col(j));
      if (j > 0) acc -= flat_flux_[j - 1] * (v.col(j) - v.col(j - 1));
      out.col(j) = acc / flat_vol_[j];
    }
    return out;
  }

  TubeField laplacian(const TubeField& v) const {
    TubeField out = t_part(v);
    out += fiber_part(v);
    return out;
  }

  /// Δ_h − Δ_{g_z,h}: the base Laplacian plus the correction operator D.
  TubeField correction(const TubeField& v) const {
    TubeField out = laplacian(v);
    out -= flat_fiber_part(v);
    return out;
  }

  void zero_boundary(TubeField& f) const {
    for (int j = 0; j < grid_.nodes(); ++j)
      if (grid_.is_boundary(j)) f.col(j).setZero();
  }

 private:
  TubeGrid grid_;
  bool separable_ = false;
  Eigen::VectorXd speed_;
  Eigen::MatrixXd vol_, tcoef_, flux_;
  Eigen::VectorXd flat_vol_, flat_flux_;
  Eigen::MatrixXd dt_;
};

/// Tube operator about a circle of radius R in the plane (n = 1).
inline TubeOperator circle_operator(const TubeGrid& grid, double radius) {
  return TubeOperator(grid, fermi::frame_tensors(manifold::circle_curve(radius, grid.fiber_dim() + 1, grid.nt())));
}

/// Straight periodic tube of the given length (the flat control).
inline TubeOperator straight_operator(const TubeGrid& grid) {
  return TubeOperator(grid, fermi::frame_tensors(manifold::straight_curve(grid.period(), grid.fiber_dim() + 1, grid.nt())));
}

}  // namespace tubesol::tube

#pragma once

// Finite-volume discretization of the radial Laplacian on [0,1] in dimension n.
// Node j sits at r_j = j·h; cell j is [r_{j-1/2}, r_{j+1/2}] clipped at 0 and 1.

#include <Eigen/Dense>
#include <cmath>

#include "tubesol/core/error.hpp"

namespace tubesol::radial {

class RadialGrid {
 public:
  RadialGrid(int n, int intervals) : n_(n), intervals_(intervals), h_(1.0 / intervals) {
    require(n >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
    require(intervals >= 2, ErrorKind::InvalidArgument, "need at least 2 intervals");
    r_ = Eigen::VectorXd::LinSpaced(intervals + 1, 0.0, 1.0);
    volume_.resize(intervals + 1);
    flux_.resize(intervals);
    for (int j = 0; j <= intervals; ++j) {
      const double lo = std::max(0.0, (j - 0.5) * h_);
      const double hi = std::min(1.0, (j + 0.5) * h_);
      volume_[j] = (std::pow(hi, n) - std::pow(lo, n)) / n;
    }
    for (int j = 0; j < intervals; ++j) flux_[j] = std::pow((j + 0.5) * h_, n - 1) / h_;
  }

  int dimension() const { return n_; }
  int intervals() const { return intervals_; }
  double spacing() const { return h_; }
  const Eigen::VectorXd& nodes() const { return r_; }
  /// ∫ r^{n-1} dr over cell j.
  const Eigen::VectorXd& volumes() const { return volume_; }
  /// r_{j+1/2}^{n-1}/h, coupling nodes j and j+1.
  const Eigen::VectorXd& fluxes() const { return flux_; }

  /// Discrete radial Laplacian at nodes 0..N-1 (u_N is the Dirichlet value, taken as given).
  Eigen::VectorXd laplacian(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(intervals_);
    for (int j = 0; j < intervals_; ++j) {
      double acc = flux_[j] * (u[j + 1] - u[j]);
      if (j > 0) acc -= flux_[j - 1] * (u[j] - u[j - 1]);
      out[j] = acc / volume_[j];
    }
    return out;
  }

 private:
  int n_;
  int intervals_;
  double h_;
  Eigen::VectorXd r_;
  Eigen::VectorXd volume_;
  Eigen::VectorXd flux_;
};

}  // namespace tubesol::radial

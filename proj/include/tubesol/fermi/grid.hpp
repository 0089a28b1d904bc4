#pragma once

// Tube grids in Fermi coordinates (t, z): the curve's t-samples times a tensor box grid in z.
// Fields are stored as (n_t × n_fiber) matrices; fiber points are ordered with axis 0 fastest.

#include <Eigen/Dense>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/spectral.hpp"

namespace tubesol::fermi {

class FiberGrid {
 public:
  FiberGrid() = default;

  /// [-half_width, half_width]^dim with `intervals` intervals per axis.
  static FiberGrid box(int dim, double half_width, int intervals) {
    require(dim >= 1, ErrorKind::InvalidArgument, "fiber dimension must be >= 1");
    require(half_width > 0.0 && intervals >= 2 && intervals % 2 == 0, ErrorKind::InvalidArgument,
            "fiber grid needs positive width and an even number of intervals");
    FiberGrid g;
    g.dim_ = dim;
    g.axis_ = Eigen::VectorXd::LinSpaced(intervals + 1, -half_width, half_width);
    g.axis_[intervals / 2] = 0.0;
    g.spacing_ = 2.0 * half_width / intervals;
    g.size_ = 1;
    for (int d = 0; d < dim; ++d) g.size_ *= intervals + 1;
    return g;
  }

  int dim() const { return dim_; }
  int axis_points() const { return int(axis_.size()); }
  const Eigen::VectorXd& axis() const { return axis_; }
  double spacing() const { return spacing_; }
  double half_width() const { return axis_[axis_.size() - 1]; }
  Eigen::Index size() const { return size_; }

  int stride(int d) const {
    int s = 1;
    for (int i = 0; i < d; ++i) s *= axis_points();
    return s;
  }
  /// Index along axis d of fiber point q.
  int coordinate_index(Eigen::Index q, int d) const { return int(q / stride(d)) % axis_points(); }
  Eigen::VectorXd point(Eigen::Index q) const {
    Eigen::VectorXd z(dim_);
    for (int d = 0; d < dim_; ++d) z[d] = axis_[coordinate_index(q, d)];
    return z;
  }
  bool on_box_boundary(Eigen::Index q) const {
    for (int d = 0; d < dim_; ++d) {
      const int i = coordinate_index(q, d);
      if (i == 0 || i == axis_points() - 1) return true;
    }
    return false;
  }

 private:
  int dim_ = 1;
  Eigen::VectorXd axis_;
  double spacing_ = 0.0;
  Eigen::Index size_ = 0;
};

/// Second-order finite differences along one fiber axis (one-sided at the box faces).
inline Eigen::MatrixXd fiber_derivative(const FiberGrid& g, const Eigen::MatrixXd& f, int axis, int order) {
  Eigen::MatrixXd out(f.rows(), f.cols());
  const int stride = g.stride(axis);
  const int last = g.axis_points() - 1;
  const double h = g.spacing();
  for (Eigen::Index q = 0; q < g.size(); ++q) {
    const int i = g.coordinate_index(q, axis);
    const auto c = [&](int offset) { return f.col(q + Eigen::Index(offset) * stride); };
    if (order == 1) {
      if (i == 0) out.col(q) = (-3.0 * c(0) + 4.0 * c(1) - c(2)) / (2.0 * h);
      else if (i == last) out.col(q) = (3.0 * c(0) - 4.0 * c(-1) + c(-2)) / (2.0 * h);
      else out.col(q) = (c(1) - c(-1)) / (2.0 * h);
    } else {
      if (i == 0) out.col(q) = (2.0 * c(0) - 5.0 * c(1) + 4.0 * c(2) - c(3)) / (h * h);
      else if (i == last) out.col(q) = (2.0 * c(0) - 5.0 * c(-1) + 4.0 * c(-2) - c(-3)) / (h * h);
      else out.col(q) = (c(1) - 2.0 * c(0) + c(-1)) / (h * h);
    }
  }
  return out;
}

/// Spectral derivative along the periodic t-direction.
inline Eigen::MatrixXd t_derivative(const Eigen::MatrixXd& f, double period, int order) {
  return spectral::differentiate_rows(f, period, order);
}

}  // namespace tubesol::fermi

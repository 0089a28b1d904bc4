#pragma once

// Discretization of B_ε(Λ) for a closed curve Λ: a periodic t-grid times a fiber grid fixed in
// rescaled coordinates s = z/ε, so ε only enters through coefficients.

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "tubesol/core/error.hpp"
#include "tubesol/radial/ground_state.hpp"

namespace tubesol::tube {

enum class FiberKind {
  Line,    ///< n = 1: nodes s_j = (j - nz)/nz, j = 0..2nz
  Radial,  ///< n >= 2, fiber-radial fields: nodes s_j = j/nz, j = 0..nz
};

/// Values at (t-node, fiber node); rows are t, columns are fiber nodes.
using TubeField = Eigen::MatrixXd;

class TubeGrid {
 public:
  TubeGrid(int n, double eps, int nz, int nt, double period)
      : n_(n), eps_(eps), nz_(nz), nt_(nt), period_(period) {
    require(n >= 1, ErrorKind::InvalidArgument, "fiber dimension must be >= 1");
    require(eps > 0.0 && std::isfinite(eps), ErrorKind::InvalidArgument, "eps must be positive");
    require(nz >= 4, ErrorKind::InvalidArgument, "nz must be >= 4");
    require(nt >= 3 && nt % 2 == 1, ErrorKind::GridMismatch, "nt must be odd and >= 3");
    require(period > 0.0, ErrorKind::InvalidArgument, "period must be positive");
    kind_ = n == 1 ? FiberKind::Line : FiberKind::Radial;
  }

  int fiber_dim() const { return n_; }
  FiberKind kind() const { return kind_; }
  double eps() const { return eps_; }
  int nz() const { return nz_; }
  int nt() const { return nt_; }
  double period() const { return period_; }
  double t_spacing() const { return period_ / nt_; }
  /// Spacing of the rescaled fiber grid.
  double spacing() const { return 1.0 / nz_; }
  double t(int i) const { return period_ * i / nt_; }

  int nodes() const { return kind_ == FiberKind::Line ? 2 * nz_ + 1 : nz_ + 1; }
  int first_free() const { return kind_ == FiberKind::Line ? 1 : 0; }
  int last_free() const { return nodes() - 2; }
  int free_count() const { return last_free() - first_free() + 1; }
  bool is_boundary(int j) const { return j == nodes() - 1 || (kind_ == FiberKind::Line && j == 0); }

  /// Rescaled coordinate of node j (signed on the line, radius otherwise).
  double s(int j) const { return kind_ == FiberKind::Line ? double(j - nz_) / nz_ : double(j) / nz_; }
  double z(int j) const { return eps_ * s(j); }
  /// Index into the unit-ball radial profile grid.
  int radial_index(int j) const { return kind_ == FiberKind::Line ? std::abs(j - nz_) : j; }

  TubeField zeros() const { return TubeField::Zero(nt_, nodes()); }

  /// Same grid at another radius.
  TubeGrid with_eps(double eps) const { return TubeGrid(n_, eps, nz_, nt_, period_); }

 private:
  int n_;
  double eps_;
  int nz_;
  int nt_;
  double period_;
  FiberKind kind_ = FiberKind::Line;
};

/// max |f| over the Dirichlet nodes.
inline double boundary_trace(const TubeGrid& g, const TubeField& f) {
  double out = 0.0;
  for (int j = 0; j < g.nodes(); ++j)
    if (g.is_boundary(j)) out = std::max(out, f.col(j).cwiseAbs().maxCoeff());
  return out;
}

inline void check_field(const TubeGrid& g, const TubeField& f) {
  if (f.rows() != g.nt() || f.cols() != g.nodes()) {
    std::ostringstream msg;
    msg << "field is " << f.rows() << "x" << f.cols() << ", grid expects " << g.nt() << "x" << g.nodes();
    fail(ErrorKind::GridMismatch, msg.str());
  }
}

/// ū_ε = ε^{-2/(p-1)} U(|z|/ε) sampled at the nodes; the profile must live on the same radial grid.
inline TubeField ansatz(const TubeGrid& g, const radial::RadialProfile& profile) {
  require(profile.intervals() == g.nz(), ErrorKind::GridMismatch, "profile grid differs from nz");
  require(profile.params().n == g.fiber_dim(), ErrorKind::GridMismatch, "profile dimension differs from fiber");
  const double scale = std::pow(g.eps(), profile.params().amplitude_exponent());
  TubeField u(g.nt(), g.nodes());
  for (int j = 0; j < g.nodes(); ++j) u.col(j).setConstant(scale * profile.values()[g.radial_index(j)]);
  for (int j = 0; j < g.nodes(); ++j)
    if (g.is_boundary(j)) u.col(j).setZero();
  return u;
}

}  // namespace tubesol::tube

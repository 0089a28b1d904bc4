#pragma once

// Pohozaev-type identity for Δu + u^p = 0 on B_ε(Λ) tested against φ = |z|²/2, the scaled
// Poincaré inequality, and the resulting nonexistence certificate for supercritical p.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tubesol/core/csv.hpp"
#include "tubesol/core/error.hpp"
#include "tubesol/core/params.hpp"
#include "tubesol/core/spectral.hpp"
#include "tubesol/pohozaev/geometry.hpp"
#include "tubesol/radial/grid.hpp"
#include "tubesol/tube/grid.hpp"

namespace tubesol::pohozaev {

using tube::FiberKind;
using tube::TubeField;
using tube::TubeGrid;

namespace detail {

enum class Parity { Even, Odd };

/// Physical fiber derivative ∂_z f. Line: centered inside, one-sided second order at the ends.
/// Radial: the value at r = 0 follows from the parity of f.
inline TubeField fiber_slope(const TubeGrid& g, const TubeField& f, Parity parity = Parity::Even) {
  const int last = g.nodes() - 1;
  const double d = g.eps() * g.spacing();
  TubeField out(f.rows(), f.cols());
  for (int j = 1; j < last; ++j) out.col(j) = (f.col(j + 1) - f.col(j - 1)) / (2.0 * d);
  out.col(last) = (3.0 * f.col(last) - 4.0 * f.col(last - 1) + f.col(last - 2)) / (2.0 * d);
  if (g.kind() == FiberKind::Line) out.col(0) = (-3.0 * f.col(0) + 4.0 * f.col(1) - f.col(2)) / (2.0 * d);
  else if (parity == Parity::Even) out.col(0).setZero();
  else out.col(0) = f.col(1) / d;
  return out;
}

inline TubeField fiber_curvature(const TubeGrid& g, const TubeField& f) {
  const int last = g.nodes() - 1;
  const double d2 = std::pow(g.eps() * g.spacing(), 2);
  TubeField out(f.rows(), f.cols());
  for (int j = 1; j < last; ++j) out.col(j) = (f.col(j + 1) - 2.0 * f.col(j) + f.col(j - 1)) / d2;
  out.col(last) = (2.0 * f.col(last) - 5.0 * f.col(last - 1) + 4.0 * f.col(last - 2) - f.col(last - 3)) / d2;
  if (g.kind() == FiberKind::Line) out.col(0) = (2.0 * f.col(0) - 5.0 * f.col(1) + 4.0 * f.col(2) - f.col(3)) / d2;
  else out.col(0) = 2.0 * (f.col(1) - f.col(0)) / d2;
  return out;
}

/// Per-point integrands of the identity.
struct Integrands {
  double gradient_sq = 0.0;
  double bulk1 = 0.0;  ///< (1/n)Δφ|∇u|² − ∇²φ(∇u,∇u)
  double bulk2 = 0.0;  ///< c'|∇u|²Δφ
  double bulk3 = 0.0;  ///< −u∇u·∇Δφ/(p+1)
  double mass = 0.0;   ///< u²
};

inline Integrands integrands(const FermiPoint& pt, int n, double p, double u, double du_t, const Eigen::VectorXd& du_z) {
  Integrands out;
  const double lap = pt.laplacian_phi(n);
  const double weight = (n - 2.0) / (2.0 * n) - 1.0 / (p + 1.0);
  out.gradient_sq = pt.gradient_sq(du_t, du_z);
  out.bulk1 = lap / n * out.gradient_sq - pt.hessian_phi(du_t, du_z);
  out.bulk2 = weight * out.gradient_sq * lap;
  out.bulk3 = -u * pt.laplacian_phi_slope(du_t, du_z) / (p + 1.0);
  out.mass = u * u;
  return out;
}

inline Eigen::VectorXd radial_vector(int n, double value) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[0] = value;
  return v;
}

inline void require_zero_trace(const TubeGrid& g, const TubeField& u) {
  const double trace = tube::boundary_trace(g, u);
  if (trace != 0.0) {
    std::ostringstream msg;
    msg << "field has boundary trace " << trace << "; the identity needs u = 0 on the boundary";
    fail(ErrorKind::NonzeroTrace, msg.str());
  }
}

struct Sums {
  double boundary = 0.0;
  std::array<double, 3> bulk{};
  double gradient_sq = 0.0;
  double mass = 0.0;
  double cross = 0.0;  ///< ∫u∇u·∇Δφ
};

/// Nodal stencil: trapezoid in z (cell volumes on the radial grid), three-point boundary slope.
inline Sums nodal_sums(const TubeGeometry& geo, const TubeField& u, double p) {
  const TubeGrid& g = geo.grid();
  const int n = g.fiber_dim(), last = g.nodes() - 1;
  const double eps = g.eps(), h = g.spacing(), ht = g.t_spacing();
  const TubeField ut = spectral::derivative_matrix(g.nt(), g.period()) * u;
  const TubeField uz = fiber_slope(g, u);
  const Eigen::VectorXd cells = g.kind() == FiberKind::Line ? Eigen::VectorXd() : radial::RadialGrid(n, g.nz()).volumes();
  Sums s;
  for (int i = 0; i < g.nt(); ++i) {
    for (int j = 0; j <= last; ++j) {
      const FermiPoint pt = geo.at(i, g.s(j));
      double w = 0.0;
      if (g.kind() == FiberKind::Line) w = ht * eps * h * std::sqrt(pt.det) * ((j == 0 || j == last) ? 0.5 : 1.0);
      else w = ht * std::pow(eps, n) * cells[j] * std::sqrt(pt.det);
      const Integrands f = integrands(pt, n, p, u(i, j), ut(i, j), radial_vector(n, uz(i, j)));
      s.gradient_sq += w * f.gradient_sq;
      s.bulk[0] += w * f.bulk1;
      s.bulk[1] += w * f.bulk2;
      s.bulk[2] += w * f.bulk3;
      s.mass += w * f.mass;
      s.cross += w * f.bulk3 * -(p + 1.0);
    }
    // ∇φ·ν = ε and |∇u|² = (∂_ν u)² on the boundary.
    for (int j = 0; j <= last; ++j) {
      if (!g.is_boundary(j)) continue;
      s.boundary += 0.5 * ht * eps * uz(i, j) * uz(i, j) * geo.density(i, g.s(j));
    }
  }
  return s;
}

/// Staggered stencil: midpoint rule over cells with midpoint differences, four-point boundary slope.
inline Sums midpoint_sums(const TubeGeometry& geo, const TubeField& u, double p) {
  const TubeGrid& g = geo.grid();
  const int n = g.fiber_dim(), last = g.nodes() - 1;
  const double eps = g.eps(), h = g.spacing(), ht = g.t_spacing(), d = eps * h;
  const TubeField ut = spectral::derivative_matrix(g.nt(), g.period()) * u;
  Sums s;
  for (int i = 0; i < g.nt(); ++i) {
    for (int j = 0; j < last; ++j) {
      const double mid = 0.5 * (g.s(j) + g.s(j + 1));
      const FermiPoint pt = geo.at(i, mid);
      const double w = ht * d * geo.density(i, mid);
      const double um = 0.5 * (u(i, j) + u(i, j + 1)), utm = 0.5 * (ut(i, j) + ut(i, j + 1));
      const Integrands f = integrands(pt, n, p, um, utm, radial_vector(n, (u(i, j + 1) - u(i, j)) / d));
      s.gradient_sq += w * f.gradient_sq;
      s.bulk[0] += w * f.bulk1;
      s.bulk[1] += w * f.bulk2;
      s.bulk[2] += w * f.bulk3;
      s.mass += w * f.mass;
      s.cross += w * f.bulk3 * -(p + 1.0);
    }
    const auto slope = [&](int b, int step) {
      return step * (-11.0 * u(i, b) + 18.0 * u(i, b + step) - 9.0 * u(i, b + 2 * step) + 2.0 * u(i, b + 3 * step)) / (6.0 * d);
    };
    double edge = slope(last, -1);
    s.boundary += 0.5 * ht * eps * edge * edge * geo.density(i, g.s(last));
    if (g.kind() == FiberKind::Line) {
      edge = slope(0, 1);
      s.boundary += 0.5 * ht * eps * edge * edge * geo.density(i, g.s(0));
    }
  }
  return s;
}

}  // namespace detail

/// (n−2)/2 − n/(p+1); positive exactly when p exceeds (n+2)/(n−2).
inline double identity_coefficient(int n, double p) { return (n - 2.0) / 2.0 - n / (p + 1.0); }

struct PohozaevReport {
  double eps = 0.0;
  double boundary_term = 0.0;      ///< ½∮|∇u|² ∇φ·ν
  std::array<double, 3> bulk{};    ///< Hessian defect, |∇u|²Δφ and u∇u·∇Δφ integrals, signed as in the identity
  double identity_residual = 0.0;  ///< boundary_term + Σ bulk (nodal stencil)
  double residual_alt = 0.0;       ///< same sum on the staggered stencil
  double gradient_sq = 0.0;        ///< ∫|∇u|²
  double mass = 0.0;               ///< ∫u²
  double coefficient = 0.0;
  GeometricBounds geometry;
  double poincare_ratio = 0.0;
  double cauchy_schwarz_lhs = 0.0;  ///< |∫u∇u·∇Δφ|
  double cauchy_schwarz_rhs = 0.0;  ///< sup|∇Δφ|·‖u‖·‖∇u‖

  double relative_residual() const { return identity_residual / gradient_sq; }
};

/// Every term of the integrated identity in the Euclidean volume form. Sphere areas are dropped
/// (all terms share them).
inline PohozaevReport integrated_identity(const TubeGeometry& geo, const TubeField& u, double p) {
  const TubeGrid& g = geo.grid();
  tube::check_field(g, u);
  detail::require_zero_trace(g, u);
  const detail::Sums a = detail::nodal_sums(geo, u, p), b = detail::midpoint_sums(geo, u, p);
  PohozaevReport out;
  out.eps = g.eps();
  out.boundary_term = a.boundary;
  out.bulk = a.bulk;
  out.identity_residual = a.boundary + a.bulk[0] + a.bulk[1] + a.bulk[2];
  out.residual_alt = b.boundary + b.bulk[0] + b.bulk[1] + b.bulk[2];
  out.gradient_sq = a.gradient_sq;
  out.mass = a.mass;
  out.coefficient = identity_coefficient(g.fiber_dim(), p);
  out.geometry = measure_geometry(geo.tensors(), g.eps());
  out.poincare_ratio = a.gradient_sq > 0.0 ? a.mass / (g.eps() * g.eps() * a.gradient_sq) : 0.0;
  out.cauchy_schwarz_lhs = std::abs(a.cross);
  out.cauchy_schwarz_rhs = out.geometry.laplacian_gradient * std::sqrt(a.mass * a.gradient_sq);
  return out;
}

/// ∫u²/(ε²∫|∇u|²) on the nodal stencil.
inline double poincare_check(const TubeGeometry& geo, const TubeField& u) {
  const TubeGrid& g = geo.grid();
  tube::check_field(g, u);
  detail::require_zero_trace(g, u);
  const detail::Sums s = detail::nodal_sums(geo, u, 3.0);
  if (!(s.mass > 0.0) || !(s.gradient_sq > 0.0)) fail(ErrorKind::ZeroField, "field vanishes identically");
  return s.mass / (g.eps() * g.eps() * s.gradient_sq);
}

/// Pointwise residual of the divergence identity for a general φ sampled on the grid, with
/// derivatives from finite differences in z and spectral differentiation in t. Dirichlet nodes are 0.
inline TubeField divergence_identity_residual(const TubeGeometry& geo, const TubeField& u, const TubeField& phi, double p) {
  const TubeGrid& g = geo.grid();
  tube::check_field(g, u);
  tube::check_field(g, phi);
  using detail::Parity;
  const int n = g.fiber_dim(), nt = g.nt(), nodes = g.nodes();
  const bool line = g.kind() == FiberKind::Line;
  const Eigen::MatrixXd Dt = spectral::derivative_matrix(nt, g.period());

  // Metric diag(G, 1) in (t, z) on the line; the flat (t, r) plane for radial fields.
  TubeField G(nt, nodes), Gt(nt, nodes), Gz(nt, nodes), rho(nt, nodes);
  const auto& ft = geo.tensors();
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nodes; ++j) {
      const double z = g.z(j), S = ft.speed[i];
      G(i, j) = S * S + z * ft.h(i, 0) + z * z * ft.k[i](0, 0);
      Gt(i, j) = 2.0 * S * ft.speed_dt[i] + z * ft.h_dt(i, 0) + z * z * ft.k_dt[i](0, 0);
      Gz(i, j) = ft.h(i, 0) + 2.0 * z * ft.k[i](0, 0);
      rho(i, j) = line ? std::sqrt(G(i, j)) : std::pow(std::abs(z), n - 1);
    }
  const auto div = [&](const TubeField& Ft, const TubeField& Fz) {
    TubeField out = Dt * (rho.cwiseProduct(Ft));
    out += detail::fiber_slope(g, rho.cwiseProduct(Fz), Parity::Odd);
    out = out.cwiseQuotient(rho);
    if (!line) out.col(0) = (Dt * Ft).col(0) + n * detail::fiber_slope(g, Fz, Parity::Odd).col(0);
    return out;
  };

  const TubeField ut = Dt * u, uz = detail::fiber_slope(g, u);
  const TubeField pt = Dt * phi, pz = detail::fiber_slope(g, phi);
  const TubeField ptt = Dt * pt, ptz = detail::fiber_slope(g, pt), pzz = detail::fiber_curvature(g, phi);
  const TubeField lap = div(pt.cwiseQuotient(G), pz);
  const TubeField lt = Dt * lap, lz = detail::fiber_slope(g, lap);

  const double q = p + 1.0, weight = (n - 2.0) / (2.0 * n) - 1.0 / q;
  TubeField Ft(nt, nodes), Fz(nt, nodes), bulk(nt, nodes);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nodes; ++j) {
      const double Gi = G(i, j), vt = ut(i, j) / Gi, vz = uz(i, j);
      const double gu_gphi = ut(i, j) * pt(i, j) / Gi + uz(i, j) * pz(i, j);
      const double grad_sq = ut(i, j) * vt + vz * vz;
      const double power = std::pow(std::max(u(i, j), 0.0), q) / q;
      const double c = gu_gphi + u(i, j) * lap(i, j) / q, e = 0.5 * grad_sq - power;
      Ft(i, j) = c * vt - e * pt(i, j) / Gi;
      Fz(i, j) = c * vz - e * pz(i, j);
      // Christoffel symbols of diag(G, 1).
      const double htt = ptt(i, j) - Gt(i, j) / (2.0 * Gi) * pt(i, j) + 0.5 * Gz(i, j) * pz(i, j);
      const double htz = ptz(i, j) - Gz(i, j) / (2.0 * Gi) * pt(i, j);
      const double hess = htt * vt * vt + 2.0 * htz * vt * vz + pzz(i, j) * vz * vz;
      const double slope = lt(i, j) * vt + lz(i, j) * vz;
      bulk(i, j) = lap(i, j) / n * grad_sq - hess + weight * grad_sq * lap(i, j) - u(i, j) * slope / q;
    }
  TubeField out = div(Ft, Fz) + bulk;
  for (int j = 0; j < nodes; ++j)
    if (g.is_boundary(j)) out.col(j).setZero();
  return out;
}

/// φ = |z|²/2 sampled on the grid.
inline TubeField distance_phi(const TubeGrid& g) {
  TubeField phi(g.nt(), g.nodes());
  for (int j = 0; j < g.nodes(); ++j) phi.col(j).setConstant(0.5 * g.z(j) * g.z(j));
  return phi;
}

enum class Verdict { NoPositiveSolution, Inconclusive };

inline std::string to_string(Verdict v) { return v == Verdict::NoPositiveSolution ? "NoPositiveSolution" : "Inconclusive"; }

struct Certificate {
  Verdict verdict = Verdict::Inconclusive;
  double eps = 0.0;
  double coefficient = 0.0;
  /// Below eps_bar the identity forces ∫|∇u|² ≤ 0. Measured on this grid: a demonstration, not a proof.
  double eps_bar = 0.0;
  double c_geo = 0.0;              ///< combined constant of the ε-terms
  double poincare_constant = 0.0;  ///< C in ∫u² ≤ Cε²∫|∇u|²
  GeometricBounds geometry;
  std::optional<PohozaevReport> candidate;
  /// identity_residual/∫|∇u|² of the candidate; a solution gives 0, the argument forces ≥ coefficient − C_geo ε.
  std::optional<double> margin;
};

/// Nonexistence threshold on the tube of radius ε about the curve with the given frame tensors.
/// SubcriticalInput for n < 3 or p below (n+2)/(n−2); the critical exponent is Inconclusive with eps_bar = 0.
inline Certificate nonexistence_certificate(const ProblemParams& params, double eps, const fermi::FrameTensors& curve,
                                            const std::optional<std::pair<TubeGeometry, TubeField>>& candidate = std::nullopt) {
  params.validate();
  const int n = params.n;
  const double p = params.p;
  if (n < 3 || p < params.critical_exponent()) {
    std::ostringstream msg;
    msg << "nonexistence needs n >= 3 and p >= (n+2)/(n-2); got n=" << n << ", p=" << p;
    fail(ErrorKind::SubcriticalInput, msg.str());
  }
  require(curve.normal_dim == n, ErrorKind::GridMismatch, "curve codimension differs from n");
  Certificate out;
  out.eps = eps;
  out.coefficient = std::max(identity_coefficient(n, p), 0.0);
  out.geometry = measure_geometry(curve, eps);
  out.poincare_constant = out.geometry.volume_spread / ball_dirichlet_eigenvalue(n);
  // Lower bounds of the three bulk integrals, per unit ∫|∇u|² and per unit ε.
  const double weight = (n - 2.0) / (2.0 * n) - 1.0 / (p + 1.0);
  out.c_geo = out.geometry.hessian_defect + weight * out.geometry.laplacian_defect +
              out.geometry.laplacian_gradient * std::sqrt(out.poincare_constant) / (p + 1.0);
  if (out.coefficient > 0.0)
    out.eps_bar = out.c_geo > 0.0 ? out.coefficient / out.c_geo : std::numeric_limits<double>::infinity();
  out.verdict = eps < out.eps_bar ? Verdict::NoPositiveSolution : Verdict::Inconclusive;
  if (candidate) {
    require(candidate->first.fiber_dim() == n && std::abs(candidate->first.grid().eps() - eps) <= 1e-14 * eps,
            ErrorKind::GridMismatch, "candidate lives on a different tube");
    out.candidate = integrated_identity(candidate->first, candidate->second, p);
    out.margin = out.candidate->relative_residual();
  }
  return out;
}

/// One line of the report: identity terms from a solution and/or a nonexistence certificate.
struct ReportRow {
  double eps = 0.0;
  double coefficient = 0.0;
  std::optional<PohozaevReport> identity;
  std::optional<Certificate> certificate;
};

/// `eps,boundary_term,bulk1,bulk2,bulk3,residual,coefficient,eps_bar,verdict`. Missing identity terms
/// are `nan`; rows without a certificate (subcritical input) carry eps_bar `nan`, verdict SubcriticalInput.
inline void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "eps,boundary_term,bulk1,bulk2,bulk3,residual,coefficient,eps_bar,verdict\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    const auto& id = r.identity;
    const std::array<double, 8> values{r.eps,
                                       id ? id->boundary_term : nan,
                                       id ? id->bulk[0] : nan,
                                       id ? id->bulk[1] : nan,
                                       id ? id->bulk[2] : nan,
                                       id ? id->identity_residual : nan,
                                       r.coefficient,
                                       r.certificate ? r.certificate->eps_bar : nan};
    for (double v : values) out << csv::format(v) << ',';
    out << (r.certificate ? to_string(r.certificate->verdict) : "SubcriticalInput") << '\n';
  }
}

}  // namespace tubesol::pohozaev

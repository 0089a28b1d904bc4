#pragma once

// Fiber-only inverse, nonlinear remainder, weighted norms and the iteration producing u_{ε,i}.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/tridiagonal.hpp"
#include "tubesol/radial/ground_state.hpp"
#include "tubesol/tube/grid.hpp"
#include "tubesol/tube/operator.hpp"

namespace tubesol::tube {

/// −(Δ_{g_z,h} + p ū^{p−1}) on one fiber, factored once and applied at every t-node.
class FiberSolver {
 public:
  FiberSolver(const TubeOperator& op, const TubeField& ubar, double p) : grid_(op.grid()) {
    check_field(grid_, ubar);
    const int first = grid_.first_free(), count = grid_.free_count();
    const auto& vol = op.flat_volumes();
    const auto& flux = op.flat_fluxes();
    Eigen::VectorXd lower(std::max(count - 1, 0)), diag(count), upper(std::max(count - 1, 0));
    for (int k = 0; k < count; ++k) {
      const int j = first + k;
      const double u = ubar(0, j);
      double d = flux[j] + (j > 0 ? flux[j - 1] : 0.0);
      diag[k] = d / vol[j] - (u > 0.0 ? p * std::pow(u, p - 1.0) : 0.0);
      if (k + 1 < count) upper[k] = -flux[j] / vol[j];
      if (k > 0) lower[k - 1] = -flux[j - 1] / vol[j];
    }
    lu_ = linalg::TridiagonalLU(lower, diag, upper);
    if (lu_.singular() || !(lu_.rcond() > 1e-14)) {
      std::ostringstream msg;
      msg << "fiber operator is numerically singular (rcond=" << lu_.rcond() << ")";
      fail(ErrorKind::SingularFiberOperator, msg.str());
    }
  }

  /// Solves −(Δ_{g_z} + p ū^{p−1}) v = rhs with v = 0 on the boundary, independently for each t.
  TubeField solve(const TubeField& rhs) const {
    check_field(grid_, rhs);
    const int first = grid_.first_free(), count = grid_.free_count();
    Eigen::MatrixXd block = rhs.middleCols(first, count).transpose();
    lu_.solve_in_place(block);
    TubeField out = grid_.zeros();
    out.middleCols(first, count) = block.transpose();
    return out;
  }

  double rcond() const { return lu_.rcond(); }

 private:
  TubeGrid grid_;
  linalg::TridiagonalLU lu_;
};

/// Fiber-only inverse applied to `rhs` (ū built from the profile).
inline TubeField assemble_model_inverse(const TubeOperator& op, const radial::RadialProfile& profile, const TubeField& rhs) {
  require(rhs.allFinite(), ErrorKind::InvalidArgument, "right-hand side is not finite");
  const FiberSolver solver(op, ansatz(op.grid(), profile), profile.params().p);
  return solver.solve(rhs);
}

/// |u+v|^p − u^p − p u^{p−1} v, using the Taylor form in w = v/u when |w| ≤ 1/2.
inline double nonlinear_remainder(double u, double v, double p) {
  if (v == 0.0) return 0.0;
  if (u > 0.0) {
    const double w = v / u;
    const double aw = std::abs(w);
    if (aw < 1e-3) {
      const double c2 = p * (p - 1.0) / 2.0, c3 = c2 * (p - 2.0) / 3.0, c4 = c3 * (p - 3.0) / 4.0;
      return std::pow(u, p) * w * w * (c2 + w * (c3 + w * c4));
    }
    if (aw <= 0.5) return std::pow(u, p) * (std::expm1(p * std::log1p(w)) - p * w);
    return std::pow(std::abs(u + v), p) - std::pow(u, p) - p * std::pow(u, p - 1.0) * v;
  }
  return std::pow(std::abs(u + v), p) - (u == 0.0 ? 0.0 : std::pow(std::abs(u), p));
}

inline TubeField nonlinear_remainder(const TubeField& base, const TubeField& v, double p) {
  TubeField out(base.rows(), base.cols());
  for (Eigen::Index c = 0; c < base.cols(); ++c)
    for (Eigen::Index r = 0; r < base.rows(); ++r) out(r, c) = nonlinear_remainder(base(r, c), v(r, c), p);
  return out;
}

/// Δ_h u + |u|^p at the free nodes (zero on the boundary).
inline TubeField pde_residual(const TubeOperator& op, const TubeField& u, double p) {
  TubeField out = op.laplacian(u);
  const auto& g = op.grid();
  for (int j = g.first_free(); j <= g.last_free(); ++j)
    out.col(j) += u.col(j).unaryExpr([p](double x) { return std::pow(std::abs(x), p); });
  return out;
}

inline double sup_norm(const TubeField& f) { return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff(); }

namespace detail {

/// One-sided second-order difference at boundary node b pointing inward (step ±1).
inline double inward_slope(const TubeField& f, int row, int b, int step) {
  return -3.0 * f(row, b) + 4.0 * f(row, b + step) - f(row, b + 2 * step);
}

}  // namespace detail

/// ‖v/ū‖_∞ including the boundary, where the quotient is the ratio of normal derivatives.
inline double relative_size(const TubeGrid& g, const TubeField& v, const TubeField& ubar) {
  double out = 0.0;
  for (int j = g.first_free(); j <= g.last_free(); ++j)
    for (int i = 0; i < g.nt(); ++i) out = std::max(out, std::abs(v(i, j) / ubar(i, j)));
  const int last = g.nodes() - 1;
  for (int i = 0; i < g.nt(); ++i) {
    out = std::max(out, std::abs(detail::inward_slope(v, i, last, -1) / detail::inward_slope(ubar, i, last, -1)));
    if (g.kind() == FiberKind::Line)
      out = std::max(out, std::abs(detail::inward_slope(v, i, 0, 1) / detail::inward_slope(ubar, i, 0, 1)));
  }
  return out;
}

/// Discrete ‖·‖_{C^{0,α}_ε} and ‖·‖_{C^{2,α}_ε}. In rescaled fiber coordinates s = z/ε the
/// ε-weights are absorbed: ε^α|f(z)−f(z')|/|z−z'|^α = |f(s)−f(s')|/|s−s'|^α and ε∂_z = ∂_s.
struct WeightedNorms {
  double sup_norm = 0.0;
  double c0alpha_eps = 0.0;
  double c2alpha_eps = 0.0;
};

namespace detail {

inline double holder_seminorm(const Eigen::VectorXd& f, const Eigen::VectorXd& s, double alpha) {
  double out = 0.0;
  for (Eigen::Index a = 0; a < f.size(); ++a)
    for (Eigen::Index b = a + 1; b < f.size(); ++b)
      out = std::max(out, std::abs(f[a] - f[b]) / std::pow(std::abs(s[a] - s[b]), alpha));
  return out;
}

}  // namespace detail

inline WeightedNorms weighted_norms(const TubeGrid& g, const TubeField& f, double alpha = 0.5) {
  check_field(g, f);
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "Hölder exponent must lie in (0,1)");
  const int nodes = g.nodes();
  const double h = g.spacing();
  Eigen::VectorXd s(nodes);
  for (int j = 0; j < nodes; ++j) s[j] = g.s(j);
  const int rows = detail::rows_identical(f) ? 1 : g.nt();
  WeightedNorms out;
  double sup = 0.0, grad = 0.0, hess = 0.0, holder = 0.0, hess_holder = 0.0;
  for (int i = 0; i < rows; ++i) {
    const Eigen::VectorXd row = f.row(i).transpose();
    Eigen::VectorXd d1(nodes), d2(nodes);
    for (int j = 0; j < nodes; ++j) {
      if (j == 0) d1[j] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h);
      else if (j == nodes - 1) d1[j] = (3.0 * row[j] - 4.0 * row[j - 1] + row[j - 2]) / (2.0 * h);
      else d1[j] = (row[j + 1] - row[j - 1]) / (2.0 * h);
      const int c = std::clamp(j, 1, nodes - 2);
      d2[j] = (row[c + 1] - 2.0 * row[c] + row[c - 1]) / (h * h);
    }
    if (g.kind() == FiberKind::Radial) {
      // Radial fields: the Hessian has eigenvalues f'' and f'/r (n−1 times).
      d1[0] = 0.0;
      d2[0] = 2.0 * (row[1] - row[0]) / (h * h);
      for (int j = 1; j < nodes; ++j) d2[j] = std::max(std::abs(d2[j]), std::abs(d1[j] / s[j]));
    }
    sup = std::max(sup, row.cwiseAbs().maxCoeff());
    grad = std::max(grad, d1.cwiseAbs().maxCoeff());
    hess = std::max(hess, d2.cwiseAbs().maxCoeff());
    holder = std::max(holder, detail::holder_seminorm(row, s, alpha));
    hess_holder = std::max(hess_holder, detail::holder_seminorm(d2, s, alpha));
  }
  out.sup_norm = sup;
  out.c0alpha_eps = sup + holder;
  out.c2alpha_eps = sup + grad + hess + hess_holder;
  return out;
}

struct IterationStep {
  int index = 0;
  double residual = 0.0;  ///< ‖Δ_h u_{ε,i} + u_{ε,i}^p‖_∞
  double ratio = 0.0;     ///< ‖v_{ε,i}/ū_ε‖_∞
  WeightedNorms correction_norms;
};

/// u_{ε,i} = ū_ε + v_{ε,i} for i = 0..i_max with the diagnostics of each step.
struct ApproximationSequence {
  double eps = 0.0;
  double p = 0.0;
  TubeField ubar;
  TubeField source;                  ///< E_ε = Δ_h ū_ε + ū_ε^p
  std::vector<TubeField> corrections;  ///< v_{ε,0} = 0, …, v_{ε,i_max}
  std::vector<IterationStep> steps;

  int depth() const { return int(corrections.size()) - 1; }
  TubeField approximation(int i) const { return ubar + corrections.at(i); }
};

inline ApproximationSequence iterate_approximation(const TubeOperator& op, const radial::RadialProfile& profile, int i_max) {
  require(i_max >= 0, ErrorKind::InvalidArgument, "i_max must be >= 0");
  const TubeGrid& g = op.grid();
  const double p = profile.params().p;
  ApproximationSequence seq;
  seq.eps = g.eps();
  seq.p = p;
  seq.ubar = ansatz(g, profile);
  seq.source = pde_residual(op, seq.ubar, p);
  const FiberSolver fiber(op, seq.ubar, p);

  seq.corrections.push_back(g.zeros());
  seq.steps.push_back({0, sup_norm(seq.source), 0.0, WeightedNorms{}});
  for (int i = 0; i < i_max; ++i) {
    const TubeField& v = seq.corrections.back();
    TubeField rhs = seq.source;
    rhs += nonlinear_remainder(seq.ubar, v, p);
    rhs += op.correction(v);
    op.zero_boundary(rhs);
    TubeField next = fiber.solve(rhs);
    const double ratio = relative_size(g, next, seq.ubar);
    if (!(ratio <= 0.5)) {
      std::ostringstream msg;
      msg << "|v_{eps," << i + 1 << "}| exceeds ubar/2 (ratio " << ratio << ") at eps=" << g.eps();
      fail(ErrorKind::PointwiseBoundViolated, msg.str());
    }
    const TubeField u = seq.ubar + next;
    seq.steps.push_back({i + 1, sup_norm(pde_residual(op, u, p)), ratio, weighted_norms(g, next)});
    seq.corrections.push_back(std::move(next));
  }
  return seq;
}

}  // namespace tubesol::tube

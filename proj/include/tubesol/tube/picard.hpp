#pragma once

// Fixed point v = L_{ε,i}⁻¹(E_{ε,i} + K_{ε,i}(v)) in the ball ‖v‖ ≤ ε^M, giving u_ε = u_{ε,i} + v.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "tubesol/core/error.hpp"
#include "tubesol/core/tridiagonal.hpp"
#include "tubesol/tube/iteration.hpp"
#include "tubesol/tube/linearized.hpp"

namespace tubesol::tube {

/// Exponents of the contraction argument: iterate depth i, gap exponent N, Schauder loss N₀ and
/// ball exponent M (radius ε^M).
struct ContractParameters {
  int i = 6;
  int N = 4;
  int N0 = 0;
  std::optional<double> M;

  /// Open interval for M: (N + N₀ − 1 − 2/(p−1), i + 2 − N − N₀ − 2/(p−1)).
  std::pair<double, double> ball_interval(double p) const {
    const double shift = 2.0 / (p - 1.0);
    return {N + N0 - 1 - shift, i + 2 - N - N0 - shift};
  }
  double ball_exponent(double p) const {
    if (M) return *M;
    const auto [lo, hi] = ball_interval(p);
    return 0.5 * (lo + hi);
  }
};

/// Default parameters for a k-dimensional base: N = k + 3, N₀ = 0, the smallest admissible i.
inline ContractParameters default_contract(int k) {
  ContractParameters c;
  c.N = k + 3;
  c.N0 = 0;
  c.i = 2 * (c.N + c.N0) - 2;
  return c;
}

inline void check_contract(const ContractParameters& c, double p) {
  std::ostringstream msg;
  if (c.i <= 2 * (c.N + c.N0) - 3) {
    msg << "i=" << c.i << " must exceed 2(N+N0)-3=" << 2 * (c.N + c.N0) - 3;
    fail(ErrorKind::ParameterContractViolated, msg.str());
  }
  const auto [lo, hi] = c.ball_interval(p);
  const double M = c.ball_exponent(p);
  if (!(M > lo && M < hi)) {
    msg << "M=" << M << " must lie in (" << lo << ", " << hi << ")";
    fail(ErrorKind::ParameterContractViolated, msg.str());
  }
}

struct PicardOptions {
  int budget = 200;
  double tol = 1e-12;  ///< stop when sup|v_{k+1} − v_k| ≤ tol·sup|u_{ε,i}|
};

struct PicardResult {
  TubeField u;
  TubeField correction;           ///< v
  int iterations = 0;
  double ball_radius = 0.0;       ///< ε^M
  double ball_norm = 0.0;         ///< discrete C¹ norm of v
  double contraction_measured = 0.0;
  double contraction_predicted = 0.0;
  double gap = 0.0;
  double residual = 0.0;          ///< ‖Δ_h u + u^p‖_∞
  double shape_error = 0.0;       ///< ‖u/ū − 1‖_∞
  bool positive = false;
};

/// sup|v| + sup|∂_s v|: fiber difference quotients in rescaled units (ε∂_z = ∂_s).
inline double ball_norm(const TubeGrid& g, const TubeField& v) {
  double grad = 0.0;
  for (int j = 0; j + 1 < g.nodes(); ++j) grad = std::max(grad, (v.col(j + 1) - v.col(j)).cwiseAbs().maxCoeff() / g.spacing());
  return sup_norm(v) + grad;
}

/// sup over nodes and |v| ≤ r of the Lipschitz constant of K_{ε,i}, namely p·|(u+v)^{p−1} − u^{p−1}|.
inline double remainder_lipschitz(const TubeField& u, double p, double r) {
  double out = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double x = std::max(u.data()[k], 0.0);
    const double base = std::pow(x, p - 1.0);
    out = std::max({out, std::abs(std::pow(x + r, p - 1.0) - base), std::abs(base - std::pow(std::max(x - r, 0.0), p - 1.0))});
  }
  return p * out;
}

inline PicardResult picard_solve(const TubeOperator& op, const ApproximationSequence& seq, const ContractParameters& contract,
                                 const PicardOptions& options = {}) {
  const double p = seq.p;
  check_contract(contract, p);
  require(seq.depth() >= contract.i, ErrorKind::InvalidArgument, "approximation sequence is shallower than i");
  const TubeGrid& g = op.grid();
  const double eps = g.eps();
  const TubeField ui = seq.approximation(contract.i);
  const TubeField source = pde_residual(op, ui, p);
  const LinearizedOperator lin(op, ui, p);

  PicardResult out;
  out.ball_radius = std::pow(eps, contract.ball_exponent(p));
  out.gap = discrete_gap(lin);
  if (out.gap < kResonanceTolerance / (eps * eps)) {
    std::ostringstream msg;
    msg << "linearized operator is singular at eps=" << eps << " (gap " << out.gap << ")";
    fail(ErrorKind::NoContraction, msg.str());
  }
  const double a_max = op.volume_ratio().middleCols(g.first_free(), g.free_count()).maxCoeff();
  out.contraction_predicted = remainder_lipschitz(ui, p, out.ball_radius) * a_max / out.gap;
  if (!(out.contraction_predicted < 1.0)) {
    std::ostringstream msg;
    msg << "predicted contraction factor " << out.contraction_predicted << " >= 1 at eps=" << eps << " (gap " << out.gap << ")";
    fail(ErrorKind::NoContraction, msg.str());
  }

  // L⁻¹: a single tridiagonal solve when everything is t-independent, sparse LU otherwise.
  const bool reduced = lin.separable() && detail::rows_identical(source);
  const int first = g.first_free(), F = g.free_count();
  linalg::TridiagonalLU tri;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  const double ht = g.t_spacing();
  if (reduced) {
    Eigen::VectorXd lower(std::max(F - 1, 0)), diag(F), upper(std::max(F - 1, 0));
    const auto& vol = op.volumes();
    const auto& flux = op.fluxes();
    for (int k = 0; k < F; ++k) {
      const int j = first + k;
      diag[k] = (flux(0, j) + (j > 0 ? flux(0, j - 1) : 0.0)) / vol(0, j) - lin.potential()(0, j);
      if (k + 1 < F) upper[k] = -flux(0, j) / vol(0, j);
      if (k > 0) lower[k - 1] = -flux(0, j - 1) / vol(0, j);
    }
    tri = linalg::TridiagonalLU(lower, diag, upper);
    require(!tri.singular(), ErrorKind::NoContraction, "linearized operator is singular");
  } else {
    lu.compute(lin.sparse_weighted());
    require(lu.info() == Eigen::Success, ErrorKind::NoContraction, "linearized operator is singular");
  }
  const auto solve = [&](const TubeField& rhs) {
    if (reduced) {
      const Eigen::VectorXd x = tri.solve(rhs.row(0).segment(first, F).transpose());
      TubeField v = g.zeros();
      for (int i = 0; i < g.nt(); ++i) v.row(i).segment(first, F) = x.transpose();
      return v;
    }
    Eigen::VectorXd b(g.nt() * F);
    for (int i = 0; i < g.nt(); ++i)
      for (int k = 0; k < F; ++k) b[i * F + k] = ht * op.volumes()(i, first + k) * rhs(i, first + k);
    return lin.unflatten(lu.solve(b));
  };

  const double scale = sup_norm(ui);
  const double noise = 1e-11 * scale;
  TubeField v = g.zeros();
  double previous_step = -1.0;
  bool converged = false;
  for (int k = 1; k <= options.budget; ++k) {
    TubeField rhs = source;
    rhs += nonlinear_remainder(ui, v, p);
    op.zero_boundary(rhs);
    TubeField next = solve(rhs);
    const double norm = ball_norm(g, next);
    if (!(norm <= out.ball_radius)) {
      std::ostringstream msg;
      msg << "iterate " << k << " has norm " << norm << " > eps^M = " << out.ball_radius << " at eps=" << eps;
      fail(ErrorKind::LeftBall, msg.str());
    }
    const double step = sup_norm(next - v);
    if (previous_step > noise && step > noise) out.contraction_measured = std::max(out.contraction_measured, step / previous_step);
    v = std::move(next);
    out.iterations = k;
    previous_step = step;
    if (out.contraction_measured >= 1.0) {
      std::ostringstream msg;
      msg << "successive corrections grew (ratio " << out.contraction_measured << ") at eps=" << eps;
      fail(ErrorKind::NoContraction, msg.str());
    }
    if (step <= options.tol * scale) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "no convergence within " << options.budget << " iterations at eps=" << eps;
    fail(ErrorKind::NoContraction, msg.str());
  }
  // Lipschitz quotient of the map on antipodal probe pairs ±r·d at the ball radius.
  const auto map = [&](const TubeField& w) {
    TubeField rhs = source;
    rhs += nonlinear_remainder(ui, w, p);
    op.zero_boundary(rhs);
    return solve(rhs);
  };
  for (const TubeField* probe : std::array<const TubeField*, 2>{&v, &seq.ubar}) {
    const double size = ball_norm(g, *probe);
    if (!(size > 0.0)) continue;
    const TubeField d = (out.ball_radius / size) * *probe;
    const TubeField diff = map(d) - map(-d);
    out.contraction_measured = std::max(out.contraction_measured, ball_norm(g, diff) / (2.0 * out.ball_radius));
  }
  if (out.contraction_measured >= 1.0) {
    std::ostringstream msg;
    msg << "map expands probe pairs at the ball radius (factor " << out.contraction_measured << ") at eps=" << eps;
    fail(ErrorKind::NoContraction, msg.str());
  }
  out.correction = v;
  out.ball_norm = ball_norm(g, v);
  out.u = ui + v;
  out.residual = sup_norm(pde_residual(op, out.u, p));
  out.shape_error = relative_size(g, out.u - seq.ubar, seq.ubar);
  out.positive = out.u.middleCols(first, F).minCoeff() > 0.0;
  return out;
}

}  // namespace tubesol::tube

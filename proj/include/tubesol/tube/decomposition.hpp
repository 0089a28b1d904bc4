#pragma once

// Splitting of an eigenfunction v = φ_{0,ε}(z)ψ(t) + v̄ with v̄ ⟂ φ_{0,ε}⊗L²(Λ) in L²(ḡ).

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "tubesol/core/error.hpp"
#include "tubesol/radial/spectrum.hpp"
#include "tubesol/tube/linearized.hpp"

namespace tubesol::tube {

struct EigenDecomposition {
  Eigen::VectorXd psi;           ///< coefficient of φ_{0,ε} at each t-node
  TubeField remainder;           ///< v̄
  TubeField ground_mode;         ///< φ_{0,ε} sampled on the grid
  double norm_sq = 0.0;          ///< ‖v‖²
  double remainder_sq = 0.0;     ///< ‖v̄‖²
  double remainder_grad_sq = 0.0;  ///< ‖∇_ḡ v̄‖²
  double ratio = 0.0;            ///< (‖∇v̄‖² + ε⁻²‖v̄‖²)/(ε⁻¹‖v‖²)
};

/// φ₀(|z|/ε) on the grid, from the radial mode-0 ground eigenfunction on the same radial grid.
inline TubeField ground_mode_field(const TubeGrid& g, const radial::RadialProfile& profile) {
  require(profile.intervals() == g.nz(), ErrorKind::GridMismatch, "profile grid differs from nz");
  const auto mode = radial::mode_spectrum(profile.grid(), radial::linearization_potential(profile), 0, 1);
  TubeField f(g.nt(), g.nodes());
  for (int j = 0; j < g.nodes(); ++j) f.col(j).setConstant(mode.eigenfunctions(g.radial_index(j), 0));
  for (int j = 0; j < g.nodes(); ++j)
    if (g.is_boundary(j)) f.col(j).setZero();
  return f;
}

/// ‖∇_ḡ f‖² = Σ h_t S [Σ_faces flux_flat (Δ_z f)² + Σ_nodes vol_flat (∂_t f)²/S²].
inline double product_gradient_sq(const TubeOperator& op, const TubeField& f) {
  const TubeGrid& g = op.grid();
  const double ht = g.t_spacing();
  const Eigen::MatrixXd dt = op.t_derivative() * f;
  double s = 0.0;
  for (int i = 0; i < g.nt(); ++i) {
    const double S = op.speed()[i];
    double fiber = 0.0, along = 0.0;
    for (int j = 0; j + 1 < g.nodes(); ++j) {
      const double d = f(i, j + 1) - f(i, j);
      fiber += op.flat_fluxes()[j] * d * d;
    }
    for (int j = g.first_free(); j <= g.last_free(); ++j) along += op.flat_volumes()[j] * dt(i, j) * dt(i, j);
    s += ht * S * (fiber + along / (S * S));
  }
  return s;
}

inline EigenDecomposition eigenfunction_decomposition(const LinearizedOperator& lin, const TubeEigenpair& pair,
                                                      const radial::RadialProfile& profile, double threshold) {
  const TubeGrid& g = lin.grid();
  const double eps = g.eps();
  if (pair.value > threshold / (eps * eps)) {
    std::ostringstream msg;
    msg << "eigenvalue " << pair.value << " exceeds C0/eps^2 = " << threshold / (eps * eps);
    fail(ErrorKind::ThresholdExceeded, msg.str());
  }
  check_field(g, pair.vector);
  EigenDecomposition out;
  out.ground_mode = ground_mode_field(g, profile);
  const TubeField& phi = out.ground_mode;
  const TubeField& w = lin.weight();
  out.psi.resize(g.nt());
  out.remainder = pair.vector;
  for (int i = 0; i < g.nt(); ++i) {
    const double num = (w.row(i).cwiseProduct(phi.row(i))).dot(pair.vector.row(i));
    const double den = (w.row(i).cwiseProduct(phi.row(i))).dot(phi.row(i));
    out.psi[i] = num / den;
    out.remainder.row(i) -= out.psi[i] * phi.row(i);
  }
  out.norm_sq = lin.inner(pair.vector, pair.vector);
  out.remainder_sq = lin.inner(out.remainder, out.remainder);
  out.remainder_grad_sq = product_gradient_sq(lin.tube(), out.remainder);
  out.ratio = (out.remainder_grad_sq + out.remainder_sq / (eps * eps)) / (out.norm_sq / eps);
  return out;
}

}  // namespace tubesol::tube

#pragma once

// Spectrum of L = -(Δ + pU^{p-1}) on the unit n-ball, split by angular mode ℓ.
//
// Normalization: eigenfunctions φ(r)·Y(θ) with Y a unit-L² spherical harmonic, so that
// ∫_0^1 φ² r^{n-1} dr = 1 (cell-volume quadrature). For n = 1 the "sphere" is {±1}:
// ℓ = 0 is the even and ℓ = 1 the odd sector, each of multiplicity 1, and the function on
// [-1,1] is φ(|x|)/√2 resp. sign(x)·φ(|x|)/√2.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/tridiagonal.hpp"
#include "tubesol/radial/ground_state.hpp"

namespace tubesol::radial {

/// Eigenvalues below this magnitude are treated as a discretization failure.
inline constexpr double kDegeneracyTolerance = 1e-6;

struct ModeSpectrum {
  int mode = 0;          ///< angular mode ℓ
  int multiplicity = 1;  ///< dimension of degree-ℓ spherical harmonics on S^{n-1}
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;  ///< column i holds φ_i at the radial nodes 0..N
};

struct SpectrumEntry {
  int mode = 0;
  int index = 0;
  int multiplicity = 1;
  double value = 0.0;
};

inline long binomial(long top, long bottom) {
  if (bottom < 0 || top < bottom || top < 0) return 0;
  long out = 1;
  for (long i = 1; i <= bottom; ++i) out = out * (top - bottom + i) / i;
  return out;
}

/// Dimension of the space of degree-ℓ spherical harmonics on S^{n-1}.
inline int harmonic_multiplicity(int n, int mode) {
  if (n == 1) return mode <= 1 ? 1 : 0;
  return int(binomial(mode + n - 1, n - 1) - binomial(mode + n - 3, n - 1));
}

/// Symmetrized tridiagonal form V^{1/2} L V^{-1/2} of a single angular mode, restricted to the
/// free nodes (0..N-1 for ℓ = 0, 1..N-1 otherwise). `potential` is sampled at the nodes.
inline linalg::SymTridiagonal mode_operator(const RadialGrid& grid, const Eigen::VectorXd& potential, int mode) {
  const int n = grid.dimension();
  const int N = grid.intervals();
  const int first = mode == 0 ? 0 : 1;
  const int size = N - first;
  const double angular = double(mode) * double(mode + n - 2);
  const auto& vol = grid.volumes();
  const auto& flux = grid.fluxes();
  const auto& r = grid.nodes();
  linalg::SymTridiagonal t{Eigen::VectorXd(size), Eigen::VectorXd(std::max(size - 1, 0))};
  for (int k = 0; k < size; ++k) {
    const int j = first + k;
    double d = flux[j] + (j > 0 ? flux[j - 1] : 0.0);
    d /= vol[j];
    if (j > 0) d += angular / (r[j] * r[j]);
    t.d[k] = d - potential[j];
    if (k + 1 < size) t.e[k] = -flux[j] / std::sqrt(vol[j] * vol[j + 1]);
  }
  return t;
}

/// Lowest `count` eigenpairs of one angular mode.
inline ModeSpectrum mode_spectrum(const RadialGrid& grid, const Eigen::VectorXd& potential, int mode, int count) {
  const int N = grid.intervals();
  const int first = mode == 0 ? 0 : 1;
  const auto op = mode_operator(grid, potential, mode);
  const auto eig = linalg::lowest_eigenpairs(op, 0, std::min<int>(count, int(op.size())));
  ModeSpectrum out;
  out.mode = mode;
  out.multiplicity = harmonic_multiplicity(grid.dimension(), mode);
  out.eigenvalues = eig.values;
  out.eigenfunctions = Eigen::MatrixXd::Zero(N + 1, eig.values.size());
  for (Eigen::Index c = 0; c < eig.values.size(); ++c) {
    for (int k = 0; k < int(op.size()); ++k)
      out.eigenfunctions(first + k, c) = eig.vectors(k, c) / std::sqrt(grid.volumes()[first + k]);
    // Deterministic sign: positive at the first node carrying weight.
    const auto col = out.eigenfunctions.col(c);
    Eigen::Index lead = 0;
    const double cut = 1e-3 * col.cwiseAbs().maxCoeff();
    while (lead < col.size() && std::abs(col[lead]) <= cut) ++lead;
    if (lead < col.size() && col[lead] < 0.0) out.eigenfunctions.col(c) *= -1.0;
  }
  return out;
}

/// p·U^{p-1} at the profile nodes.
inline Eigen::VectorXd linearization_potential(const RadialProfile& profile) {
  const double p = profile.params().p;
  return profile.values().unaryExpr([p](double u) { return u > 0.0 ? p * std::pow(u, p - 1.0) : 0.0; });
}

/// All entries across modes, ascending by value.
inline std::vector<SpectrumEntry> merged_spectrum(const std::vector<ModeSpectrum>& modes) {
  std::vector<SpectrumEntry> out;
  for (const auto& m : modes)
    for (Eigen::Index i = 0; i < m.eigenvalues.size(); ++i)
      out.push_back({m.mode, int(i), m.multiplicity, m.eigenvalues[i]});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

/// Spectrum of the linearization per angular mode ℓ = 0..max_mode (n = 1 has only ℓ ≤ 1).
inline std::vector<ModeSpectrum> linearized_spectrum(const RadialProfile& profile, int max_mode, int eigs_per_mode) {
  require(max_mode >= 0, ErrorKind::InvalidArgument, "max_mode must be >= 0");
  require(eigs_per_mode >= 1, ErrorKind::InvalidArgument, "eigs_per_mode must be >= 1");
  const int n = profile.params().n;
  const int top = n == 1 ? std::min(max_mode, 1) : max_mode;
  const Eigen::VectorXd potential = linearization_potential(profile);
  std::vector<ModeSpectrum> modes;
  for (int mode = 0; mode <= top; ++mode) modes.push_back(mode_spectrum(profile.grid(), potential, mode, eigs_per_mode));

  for (const auto& m : modes)
    for (Eigen::Index i = 0; i < m.eigenvalues.size(); ++i)
      if (std::abs(m.eigenvalues[i]) < kDegeneracyTolerance) {
        std::ostringstream msg;
        msg << "eigenvalue " << m.eigenvalues[i] << " (mode " << m.mode << ", index " << i << ") is numerically zero";
        fail(ErrorKind::DegenerateSpectrum, msg.str());
      }
  const auto merged = merged_spectrum(modes);
  require(merged.front().mode == 0 && merged.front().value < 0.0, ErrorKind::DegenerateSpectrum,
          "lowest eigenvalue is not a negative radial mode");
  if (merged.size() > 1)
    require(merged[1].value > 0.0, ErrorKind::DegenerateSpectrum, "second eigenvalue is not positive");
  return modes;
}

/// μ₀: the lowest eigenvalue across modes.
inline double ground_eigenvalue(const std::vector<ModeSpectrum>& modes) { return merged_spectrum(modes).at(0).value; }

/// μ₁: the next eigenvalue after μ₀ across modes.
inline double first_excited_eigenvalue(const std::vector<ModeSpectrum>& modes) {
  const auto merged = merged_spectrum(modes);
  require(merged.size() >= 2, ErrorKind::RangeExceeded, "need at least two eigenvalues");
  return merged[1].value;
}

}  // namespace tubesol::radial

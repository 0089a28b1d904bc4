#pragma once

// L_{ε,i} = −(Δ_h + p u^{p−1}) and L̃ = a·L on the free nodes of the tube grid.
//
// Weighted form K = h_t·vol·L is symmetric; L̃ is the pencil (K, W) with W = h_t·S·vol_flat the
// ḡ-volume weight. With t-independent coefficients the pencil splits over Fourier modes m, each a
// symmetric tridiagonal matrix ω_m²·tcoef + (fiber fluxes) − vol·p u^{p−1}.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/tridiagonal.hpp"
#include "tubesol/tube/grid.hpp"
#include "tubesol/tube/operator.hpp"

namespace tubesol::tube {

/// Relative tolerance below which an eigenvalue counts as zero: |ν| < 1e-10·ε⁻².
inline constexpr double kResonanceTolerance = 1e-10;

struct TubeEigenpair {
  double value = 0.0;
  int mode = 0;          ///< Fourier mode in t (separable case), −1 otherwise
  int multiplicity = 1;
  TubeField vector;      ///< ḡ-normalized: Σ W v² = 1
};

/// One Fourier block of the separable pencil.
struct ModeBlock {
  int mode = 0;
  int multiplicity = 1;
  double frequency = 0.0;
  linalg::SymTridiagonal weighted;  ///< K restricted to the mode (h_t factor dropped)
  linalg::SymTridiagonal scaled;    ///< W^{-1/2} K W^{-1/2}: eigenvalues of L̃
};

class LinearizedOperator {
 public:
  LinearizedOperator(const TubeOperator& op, const TubeField& u, double p) : op_(op), p_(p) {
    const TubeGrid& g = op.grid();
    check_field(g, u);
    for (int j = g.first_free(); j <= g.last_free(); ++j)
      if (!(u.col(j).minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg << "state is not positive in the interior (min " << u.col(j).minCoeff() << " at fiber node " << j << ")";
        fail(ErrorKind::NonpositiveState, msg.str());
      }
    potential_ = u.unaryExpr([p](double x) { return x > 0.0 ? p * std::pow(x, p - 1.0) : 0.0; });
    weight_.resize(g.nt(), g.nodes());
    for (int i = 0; i < g.nt(); ++i) weight_.row(i) = g.t_spacing() * op.speed()[i] * op.flat_volumes().transpose();
    separable_ = op.separable() && detail::rows_identical(u);
    if (separable_) build_modes();
  }

  const TubeOperator& tube() const { return op_; }
  const TubeGrid& grid() const { return op_.grid(); }
  bool separable() const { return separable_; }
  const std::vector<ModeBlock>& modes() const { return modes_; }
  /// p·u^{p−1} at the nodes.
  const TubeField& potential() const { return potential_; }
  /// ḡ-volume weights h_t·S·vol_flat.
  const TubeField& weight() const { return weight_; }

  /// K v = h_t·vol·L v (zero on the boundary).
  TubeField apply_weighted(const TubeField& v) const {
    TubeField lv = op_.laplacian(v);
    lv += potential_.cwiseProduct(v);
    TubeField out = -op_.grid().t_spacing() * op_.volumes().cwiseProduct(lv);
    op_.zero_boundary(out);
    return out;
  }

  /// L v.
  TubeField apply(const TubeField& v) const {
    TubeField out = -op_.laplacian(v);
    out -= potential_.cwiseProduct(v);
    op_.zero_boundary(out);
    return out;
  }

  /// L̃ v = a·L v.
  TubeField apply_tilde(const TubeField& v) const {
    TubeField out = apply_weighted(v);
    for (int j = grid().first_free(); j <= grid().last_free(); ++j) out.col(j) = out.col(j).cwiseQuotient(weight_.col(j));
    return out;
  }

  /// ⟨v, w⟩ in L²(ḡ).
  double inner(const TubeField& v, const TubeField& w) const {
    double s = 0.0;
    for (int j = grid().first_free(); j <= grid().last_free(); ++j) s += (weight_.col(j).cwiseProduct(v.col(j))).dot(w.col(j));
    return s;
  }

  /// |⟨v, L̃w⟩ − ⟨w, L̃v⟩| relative to ‖v‖‖L̃w‖ + ‖w‖‖L̃v‖.
  double symmetry_defect(const TubeField& v, const TubeField& w) const {
    const TubeField lv = apply_tilde(v), lw = apply_tilde(w);
    const double a = inner(v, lw), b = inner(w, lv);
    const double scale = std::sqrt(inner(v, v) * inner(lw, lw)) + std::sqrt(inner(w, w) * inner(lv, lv));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
  }

  /// Number of negative eigenvalues of the pencil (Sylvester inertia).
  int negative_count() const {
    if (separable_) {
      int count = 0;
      for (const auto& b : modes_) count += b.multiplicity * linalg::count_below(b.weighted, 0.0);
      return count;
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sparse_weighted());
    require(ldlt.info() == Eigen::Success, ErrorKind::OnResonance, "LDLT inertia factorization failed");
    return int((ldlt.vectorD().array() < 0.0).count());
  }

  /// min |ν| over the spectrum of L̃ with the eigenpair attaining it.
  TubeEigenpair nearest_to_zero() const {
    if (separable_) {
      TubeEigenpair best;
      best.value = std::numeric_limits<double>::infinity();
      for (const auto& b : modes_) {
        const int below = linalg::count_below(b.scaled, 0.0);
        for (int idx : {below - 1, below}) {
          if (idx < 0 || idx >= int(b.scaled.size())) continue;
          const auto eig = linalg::lowest_eigenpairs(b.scaled, idx, 1);
          if (std::abs(eig.values[0]) < std::abs(best.value)) best = expand(b, eig.values[0], eig.vectors.col(0));
        }
      }
      return best;
    }
    return general_eigenpairs(0.0, 1).front();
  }

  /// Lowest `count` eigenpairs of L̃ (a multiple eigenvalue occupies `multiplicity` slots).
  std::vector<TubeEigenpair> lowest(int count) const {
    require(count >= 1, ErrorKind::InvalidArgument, "count must be >= 1");
    if (separable_) {
      std::vector<TubeEigenpair> all;
      for (const auto& b : modes_) {
        const int take = std::min<int>(count, int(b.scaled.size()));
        const auto eig = linalg::lowest_eigenpairs(b.scaled, 0, take);
        for (Eigen::Index c = 0; c < eig.values.size(); ++c) all.push_back(expand(b, eig.values[c], eig.vectors.col(c)));
      }
      std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
      std::vector<TubeEigenpair> out;
      int slots = 0;
      for (auto& e : all) {
        if (slots >= count) break;
        slots += e.multiplicity;
        out.push_back(std::move(e));
      }
      return out;
    }
    // Shift strictly below the spectrum: K + vol·P is positive semidefinite.
    double floor = 0.0;
    for (int j = grid().first_free(); j <= grid().last_free(); ++j)
      for (int i = 0; i < grid().nt(); ++i)
        floor = std::max(floor, grid().t_spacing() * op_.volumes()(i, j) * potential_(i, j) / weight_(i, j));
    return general_eigenpairs(-1.05 * floor - 1.0, count);
  }

  /// Free-node sparse matrix of K, unknown (i, j) at i·F + (j − first).
  Eigen::SparseMatrix<double> sparse_weighted() const {
    const TubeGrid& g = grid();
    const int nt = g.nt(), F = g.free_count(), first = g.first_free();
    const double ht = g.t_spacing();
    const auto& vol = op_.volumes();
    const auto& flux = op_.fluxes();
    const auto& tc = op_.t_coefficients();
    const Eigen::MatrixXd& D = op_.t_derivative();
    std::vector<Eigen::Triplet<double>> trip;
    const auto index = [&](int i, int j) { return i * F + (j - first); };
    for (int i = 0; i < nt; ++i)
      for (int j = first; j <= g.last_free(); ++j) {
        double d = flux(i, j) + (j > 0 ? flux(i, j - 1) : 0.0) - vol(i, j) * potential_(i, j);
        trip.emplace_back(index(i, j), index(i, j), ht * d);
        if (j + 1 <= g.last_free()) {
          trip.emplace_back(index(i, j), index(i, j + 1), -ht * flux(i, j));
          trip.emplace_back(index(i, j + 1), index(i, j), -ht * flux(i, j));
        }
      }
    // Tangential block Dᵀ diag(tcoef) D for every fiber node.
    for (int j = first; j <= g.last_free(); ++j) {
      const Eigen::MatrixXd block = D.transpose() * tc.col(j).asDiagonal() * D;
      for (int a = 0; a < nt; ++a)
        for (int b = 0; b < nt; ++b)
          if (block(a, b) != 0.0) trip.emplace_back(index(a, j), index(b, j), ht * block(a, b));
    }
    Eigen::SparseMatrix<double> K(nt * F, nt * F);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
  }

  Eigen::VectorXd flat_weight() const {
    const TubeGrid& g = grid();
    const int F = g.free_count(), first = g.first_free();
    Eigen::VectorXd w(g.nt() * F);
    for (int i = 0; i < g.nt(); ++i)
      for (int k = 0; k < F; ++k) w[i * F + k] = weight_(i, first + k);
    return w;
  }

  TubeField unflatten(const Eigen::VectorXd& x) const {
    const TubeGrid& g = grid();
    const int F = g.free_count(), first = g.first_free();
    TubeField f = g.zeros();
    for (int i = 0; i < g.nt(); ++i)
      for (int k = 0; k < F; ++k) f(i, first + k) = x[i * F + k];
    return f;
  }

 private:
  void build_modes() {
    const TubeGrid& g = grid();
    const int nt = g.nt(), F = g.free_count(), first = g.first_free();
    const double S = op_.speed()[0];
    const auto& vol = op_.volumes();
    const auto& flux = op_.fluxes();
    const auto& tc = op_.t_coefficients();
    Eigen::VectorXd w(F);
    for (int k = 0; k < F; ++k) w[k] = S * op_.flat_volumes()[first + k];
    const Eigen::VectorXd root = w.cwiseSqrt();
    for (int m = 0; m <= (nt - 1) / 2; ++m) {
      ModeBlock b;
      b.mode = m;
      b.multiplicity = m == 0 ? 1 : 2;
      b.frequency = 2.0 * std::numbers::pi * m / g.period();
      const double w2 = b.frequency * b.frequency;
      b.weighted.d.resize(F);
      b.weighted.e.resize(std::max(F - 1, 0));
      for (int k = 0; k < F; ++k) {
        const int j = first + k;
        b.weighted.d[k] = w2 * tc(0, j) + flux(0, j) + (j > 0 ? flux(0, j - 1) : 0.0) - vol(0, j) * potential_(0, j);
        if (k + 1 < F) b.weighted.e[k] = -flux(0, j);
      }
      b.scaled.d = b.weighted.d.cwiseQuotient(w);
      b.scaled.e.resize(b.weighted.e.size());
      for (Eigen::Index k = 0; k < b.weighted.e.size(); ++k) b.scaled.e[k] = b.weighted.e[k] / (root[k] * root[k + 1]);
      modes_.push_back(std::move(b));
    }
  }

  /// Full eigenfunction cos(ω_m t)·y(z) from a Euclidean-normalized scaled eigenvector.
  TubeEigenpair expand(const ModeBlock& b, double value, const Eigen::VectorXd& y) const {
    const TubeGrid& g = grid();
    const int first = g.first_free();
    const double S = op_.speed()[0];
    TubeEigenpair e;
    e.value = value;
    e.mode = b.mode;
    e.multiplicity = b.multiplicity;
    e.vector = g.zeros();
    const double P = g.period();
    for (int i = 0; i < g.nt(); ++i) {
      const double c = b.mode == 0 ? 1.0 / std::sqrt(P) : std::sqrt(2.0 / P) * std::cos(b.frequency * g.t(i));
      for (int k = 0; k < int(y.size()); ++k)
        e.vector(i, first + k) = c * y[k] / std::sqrt(S * op_.flat_volumes()[first + k]);
    }
    return e;
  }

  /// `count` eigenpairs of (K, W) nearest to `shift` by shift-invert subspace iteration.
  std::vector<TubeEigenpair> general_eigenpairs(double shift, int count) const {
    const Eigen::SparseMatrix<double> K = sparse_weighted();
    const Eigen::VectorXd w = flat_weight();
    const Eigen::Index N = K.rows();
    const int block = std::min<int>(int(N), count + 6);
    Eigen::SparseMatrix<double> A = K;
    for (Eigen::Index r = 0; r < N; ++r) A.coeffRef(r, r) -= shift * w[r];
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    require(lu.info() == Eigen::Success, ErrorKind::OnResonance, "shift-invert factorization failed");
    std::mt19937 rng(12345);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd X(N, block);
    for (Eigen::Index c = 0; c < X.cols(); ++c)
      for (Eigen::Index r = 0; r < N; ++r) X(r, c) = normal(rng);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(block), previous;
    for (int it = 0; it < 1000; ++it) {
      const Eigen::MatrixXd WX = w.asDiagonal() * X;
      Eigen::MatrixXd Y = lu.solve(WX);
      // W-orthonormalize, then Rayleigh–Ritz on the subspace.
      const Eigen::MatrixXd gram = Y.transpose() * w.asDiagonal() * Y;
      const Eigen::LLT<Eigen::MatrixXd> llt(gram);
      const Eigen::MatrixXd Linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(block, block));
      Y = Y * Linv.transpose();
      const Eigen::MatrixXd KY = K * Y;
      const Eigen::MatrixXd R = Y.transpose() * KY;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (R + R.transpose()));
      std::vector<int> order(block);
      for (int c = 0; c < block; ++c) order[c] = c;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(ritz.eigenvalues()[a] - shift) < std::abs(ritz.eigenvalues()[b] - shift);
      });
      Eigen::MatrixXd Xn(N, block);
      Eigen::VectorXd vals(block);
      for (int c = 0; c < block; ++c) {
        Xn.col(c) = Y * ritz.eigenvectors().col(order[c]);
        vals[c] = ritz.eigenvalues()[order[c]];
      }
      X = Xn;
      previous = values;
      values = vals;
      if (it > 2) {
        double change = 0.0;
        for (int c = 0; c < count; ++c) change = std::max(change, std::abs(values[c] - previous[c]) / std::max(1.0, std::abs(values[c])));
        if (change < 1e-13) break;
      }
    }
    std::vector<TubeEigenpair> out;
    for (int c = 0; c < count; ++c) {
      TubeEigenpair e;
      e.value = values[c];
      e.mode = -1;
      e.vector = unflatten(X.col(c));
      out.push_back(std::move(e));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    return out;
  }

  TubeOperator op_;
  double p_;
  TubeField potential_;
  TubeField weight_;
  bool separable_ = false;
  std::vector<ModeBlock> modes_;
};

inline LinearizedOperator assemble_linearized(const TubeOperator& op, const TubeField& u, double p) {
  return LinearizedOperator(op, u, p);
}

/// Smallest |ν| over the spectrum of L̃ (the discrete gap δ_{ε,i}).
inline double discrete_gap(const LinearizedOperator& lin) { return std::abs(lin.nearest_to_zero().value); }

/// Morse index of L_{ε,i} (equal to that of L̃); OnResonance when 0 is numerically in the spectrum.
inline int morse_index_discrete(const LinearizedOperator& lin) {
  const double eps = lin.grid().eps();
  const double gap = discrete_gap(lin);
  if (gap < kResonanceTolerance / (eps * eps)) {
    std::ostringstream msg;
    msg << "eigenvalue " << gap << " is numerically zero at eps=" << eps;
    fail(ErrorKind::OnResonance, msg.str());
  }
  return lin.negative_count();
}

}  // namespace tubesol::tube

#pragma once

// Euclidean Laplacian in Fermi coordinates and its split Δ = Δ_ḡ + D, where
// Δ_ḡ = |Y'|^{-1} ∂_t(|Y'|^{-1} ∂_t) + Δ_z is the product-metric Laplacian.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "tubesol/core/csv.hpp"
#include "tubesol/core/error.hpp"
#include "tubesol/fermi/expansion.hpp"

namespace tubesol::fermi {

/// Coefficient fields of D = c_tt ∂_t² + 2 Σ c_tz_i ∂_t∂_{z_i} + Σ c_zz_ij ∂_{z_i}∂_{z_j} + c_t ∂_t + Σ c_z_i ∂_{z_i}.
/// The second-order coefficients vanish at z = 0.
struct CorrectionOperator {
  Eigen::MatrixXd tt;
  std::vector<Eigen::MatrixXd> tz;
  std::vector<std::vector<Eigen::MatrixXd>> zz;
  Eigen::MatrixXd t;
  std::vector<Eigen::MatrixXd> z;
  /// max |c_zz|: zero exactly when the frame has no normal twist (ℓ ≡ 0).
  double zz_magnitude = 0.0;
  /// max over the grid of all coefficient magnitudes.
  double max_coefficient = 0.0;
};

struct FieldDerivatives {
  Eigen::MatrixXd t, tt;
  std::vector<Eigen::MatrixXd> z, tz;
  std::vector<std::vector<Eigen::MatrixXd>> zz;
};

inline void check_field(const FermiExpansion& e, const Eigen::MatrixXd& f) {
  require(f.rows() == e.t_samples() && f.cols() == e.fiber().size(), ErrorKind::GridMismatch,
          "field shape does not match the Fermi grid");
}

inline FieldDerivatives derivatives(const FermiExpansion& e, const Eigen::MatrixXd& f) {
  check_field(e, f);
  const int n = e.fiber().dim();
  FieldDerivatives d;
  d.t = t_derivative(f, e.period(), 1);
  d.tt = t_derivative(f, e.period(), 2);
  d.zz.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (int i = 0; i < n; ++i) {
    d.z.push_back(fiber_derivative(e.fiber(), f, i, 1));
    d.tz.push_back(t_derivative(d.z.back(), e.period(), 1));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d.zz[i][j] = i == j ? fiber_derivative(e.fiber(), f, i, 2) : fiber_derivative(e.fiber(), d.z[j], i, 1);
  return d;
}

inline CorrectionOperator laplacian_split(const FermiExpansion& e) {
  const int N = e.t_samples();
  const Eigen::Index Q = e.fiber().size();
  const int n = e.fiber().dim();
  const auto& ft = e.tensors();
  CorrectionOperator op;
  op.tt.resize(N, Q);
  op.t.resize(N, Q);
  op.tz.assign(n, Eigen::MatrixXd(N, Q));
  op.z.assign(n, Eigen::MatrixXd(N, Q));
  op.zz.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd(N, Q)));
  for (int j = 0; j < N; ++j) {
    const double S = ft.speed[j];
    require(S > 0.0, ErrorKind::SingularMetric, "zero speed on the core curve");
    for (Eigen::Index q = 0; q < Q; ++q) {
      const PointMetric& pm = e.at(j, q);
      require(pm.det > 0.0, ErrorKind::SingularMetric, "metric determinant is not positive");
      op.tt(j, q) = pm.inv_tt - 1.0 / (S * S);
      op.t(j, q) = pm.drift_t + ft.speed_dt[j] / (S * S * S);
      for (int a = 0; a < n; ++a) {
        op.tz[a](j, q) = pm.inv_tz[a];
        op.z[a](j, q) = pm.drift_z[a];
        for (int b = 0; b < n; ++b) {
          op.zz[a][b](j, q) = pm.inv_zz(a, b) - (a == b ? 1.0 : 0.0);
          op.zz_magnitude = std::max(op.zz_magnitude, std::abs(op.zz[a][b](j, q)));
        }
      }
    }
  }
  op.max_coefficient = std::max(op.tt.cwiseAbs().maxCoeff(), op.t.cwiseAbs().maxCoeff());
  for (int a = 0; a < n; ++a)
    op.max_coefficient = std::max({op.max_coefficient, op.tz[a].cwiseAbs().maxCoeff(), op.z[a].cwiseAbs().maxCoeff(),
                                   op.zz_magnitude});
  return op;
}

/// D f with finite differences in z and spectral differentiation in t.
inline Eigen::MatrixXd apply_correction(const FermiExpansion& e, const CorrectionOperator& op, const Eigen::MatrixXd& f) {
  const auto d = derivatives(e, f);
  const int n = e.fiber().dim();
  Eigen::MatrixXd out = op.tt.cwiseProduct(d.tt) + op.t.cwiseProduct(d.t);
  for (int a = 0; a < n; ++a) {
    out += 2.0 * op.tz[a].cwiseProduct(d.tz[a]) + op.z[a].cwiseProduct(d.z[a]);
    for (int b = 0; b < n; ++b) out += op.zz[a][b].cwiseProduct(d.zz[a][b]);
  }
  return out;
}

/// Δ_ḡ f.
inline Eigen::MatrixXd apply_product_laplacian(const FermiExpansion& e, const Eigen::MatrixXd& f) {
  const auto d = derivatives(e, f);
  const auto& ft = e.tensors();
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (int j = 0; j < e.t_samples(); ++j) {
    const double S = ft.speed[j];
    out.row(j) = d.tt.row(j) / (S * S) - ft.speed_dt[j] / (S * S * S) * d.t.row(j);
  }
  for (int a = 0; a < e.fiber().dim(); ++a) out += d.zz[a][a];
  return out;
}

/// Euclidean Δf in divergence form (1/√g) ∂_a(√g g^{ab} ∂_b f). Interior nodes use a compact
/// staggered stencil for the diagonal z-terms; nodes on the box faces use the expanded form.
inline Eigen::MatrixXd apply_laplacian(const FermiExpansion& e, const Eigen::MatrixXd& f) {
  check_field(e, f);
  const FiberGrid& fg = e.fiber();
  const int N = e.t_samples();
  const Eigen::Index Q = fg.size();
  const int n = fg.dim();
  const double h = fg.spacing();
  const Eigen::MatrixXd f_t = t_derivative(f, e.period(), 1);
  std::vector<Eigen::MatrixXd> f_z;
  for (int a = 0; a < n; ++a) f_z.push_back(fiber_derivative(fg, f, a, 1));

  Eigen::MatrixXd root(N, Q), flux_t(N, Q);
  std::vector<Eigen::MatrixXd> cross(n, Eigen::MatrixXd(N, Q));  // √g (g^{at} f_t + Σ_{b≠a} g^{ab} f_{z_b})
  std::vector<Eigen::MatrixXd> diag(n, Eigen::MatrixXd(N, Q));   // √g g^{aa}
  for (int j = 0; j < N; ++j)
    for (Eigen::Index q = 0; q < Q; ++q) {
      const PointMetric& pm = e.at(j, q);
      const double r = pm.sqrt_det();
      root(j, q) = r;
      double acc = pm.inv_tt * f_t(j, q);
      for (int a = 0; a < n; ++a) acc += pm.inv_tz[a] * f_z[a](j, q);
      flux_t(j, q) = r * acc;
      for (int a = 0; a < n; ++a) {
        double c = pm.inv_tz[a] * f_t(j, q);
        for (int b = 0; b < n; ++b)
          if (b != a) c += pm.inv_zz(a, b) * f_z[b](j, q);
        cross[a](j, q) = r * c;
        diag[a](j, q) = r * pm.inv_zz(a, a);
      }
    }
  Eigen::MatrixXd div = t_derivative(flux_t, e.period(), 1);
  for (int a = 0; a < n; ++a) div += fiber_derivative(fg, cross[a], a, 1);

  Eigen::MatrixXd out(N, Q);
  Eigen::MatrixXd expanded;
  for (Eigen::Index q = 0; q < Q; ++q) {
    if (fg.on_box_boundary(q)) {
      if (expanded.size() == 0) expanded = apply_product_laplacian(e, f) + apply_correction(e, laplacian_split(e), f);
      out.col(q) = expanded.col(q);
      continue;
    }
    Eigen::VectorXd acc = div.col(q);
    for (int a = 0; a < n; ++a) {
      const Eigen::Index s = fg.stride(a);
      const Eigen::VectorXd up = 0.5 * (diag[a].col(q) + diag[a].col(q + s));
      const Eigen::VectorXd down = 0.5 * (diag[a].col(q) + diag[a].col(q - s));
      acc += (up.cwiseProduct(f.col(q + s) - f.col(q)) - down.cwiseProduct(f.col(q) - f.col(q - s))) / (h * h);
    }
    out.col(q) = acc.cwiseQuotient(root.col(q));
  }
  return out;
}

/// Coefficient dump: `t,z1[,z2…],value`.
inline csv::Table coefficient_table(const FermiExpansion& e, const Eigen::MatrixXd& field) {
  check_field(e, field);
  csv::Table tab;
  tab.header = {"t"};
  for (int a = 0; a < e.fiber().dim(); ++a) tab.header.push_back("z" + std::to_string(a + 1));
  tab.header.push_back("value");
  for (int j = 0; j < e.t_samples(); ++j)
    for (Eigen::Index q = 0; q < e.fiber().size(); ++q) {
      std::vector<double> row{e.curve().parameter(j)};
      const Eigen::VectorXd z = e.fiber().point(q);
      for (int a = 0; a < z.size(); ++a) row.push_back(z[a]);
      row.push_back(field(j, q));
      tab.rows.push_back(std::move(row));
    }
  return tab;
}

/// Samples f(x∘Φ(t_j, z_q)) for a function of the ambient point.
template <class Fn>
Eigen::MatrixXd ambient_field(const FermiExpansion& e, Fn&& fn) {
  const auto& c = e.curve();
  Eigen::MatrixXd out(e.t_samples(), e.fiber().size());
  for (int j = 0; j < e.t_samples(); ++j)
    for (Eigen::Index q = 0; q < e.fiber().size(); ++q) {
      const Eigen::VectorXd z = e.fiber().point(q);
      Eigen::VectorXd x = c.points().row(j).transpose();
      for (int a = 0; a < z.size(); ++a) x += z[a] * c.normal(a).row(j).transpose();
      out(j, q) = fn(x);
    }
  return out;
}

}  // namespace tubesol::fermi

#pragma once

// Fourier differentiation on uniform periodic grids.

#include <unsupported/Eigen/FFT>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "tubesol/core/error.hpp"

namespace tubesol::spectral {

/// Derivative of periodic samples f(t_j), t_j = j·period/N, via FFT. The Nyquist mode of an
/// even-length signal is dropped.
inline Eigen::VectorXd differentiate(const Eigen::VectorXd& samples, double period, int order = 1) {
  const Eigen::Index n = samples.size();
  require(n >= 3, ErrorKind::InvalidArgument, "need at least 3 periodic samples");
  require(period > 0.0, ErrorKind::InvalidArgument, "period must be positive");
  Eigen::FFT<double> fft;
  std::vector<double> in(samples.data(), samples.data() + n);
  std::vector<std::complex<double>> coeffs;
  fft.fwd(coeffs, in);
  const double scale = 2.0 * std::numbers::pi / period;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index wave = (j <= n / 2) ? j : j - n;
    if (n % 2 == 0 && j == n / 2) {
      coeffs[j] = 0.0;
      continue;
    }
    const std::complex<double> ik(0.0, scale * double(wave));
    coeffs[j] *= std::pow(ik, order);
  }
  std::vector<double> out;
  fft.inv(out, coeffs);
  return Eigen::Map<Eigen::VectorXd>(out.data(), n);
}

/// Column-wise derivative of a matrix of periodic samples (rows = t-nodes).
inline Eigen::MatrixXd differentiate_rows(const Eigen::MatrixXd& samples, double period, int order = 1) {
  Eigen::MatrixXd out(samples.rows(), samples.cols());
  for (Eigen::Index c = 0; c < samples.cols(); ++c) out.col(c) = differentiate(samples.col(c), period, order);
  return out;
}

/// Dense first-derivative matrix for an odd number of periodic nodes:
/// D_ij = ½(−1)^{i−j} / sin((i−j)h/2), scaled to the period.
inline Eigen::MatrixXd derivative_matrix(int n, double period) {
  require(n >= 3 && n % 2 == 1, ErrorKind::InvalidArgument, "derivative matrix needs odd n >= 3");
  const double h = 2.0 * std::numbers::pi / n;
  const double scale = 2.0 * std::numbers::pi / period;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = scale * 0.5 * sign / std::sin(k * h / 2.0);
    }
  }
  return d;
}

}  // namespace tubesol::spectral

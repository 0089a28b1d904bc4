#pragma once

// Finite-difference ε-derivative of an isolated eigenvalue branch, tracked by eigenvector overlap.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/resonance/lattice.hpp"

namespace tubesol::resonance {

/// Eigenvalues (ascending) with eigenvectors on an ε-independent index set and the inner-product weight.
struct BranchSample {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  ///< columns
  Eigen::VectorXd weight;   ///< diagonal inner-product weight (empty means Euclidean)
};

using OperatorFamily = std::function<BranchSample(double eps)>;

struct KatoReport {
  double eps = 0.0;
  double step = 0.0;
  double value = 0.0;
  double derivative = 0.0;  ///< centered difference dν/dε
  double constant = 0.0;    ///< derivative·ε³ (the measured C₂ when positive)
  double overlap = 0.0;     ///< worst eigenvector overlap with the central branch
  double isolation = 0.0;   ///< distance to the nearest other eigenvalue at ε
};

namespace detail {

inline double overlap(const BranchSample& s, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (s.weight.size() == 0) return std::abs(a.dot(b)) / (a.norm() * b.norm());
  const double ab = (a.cwiseProduct(s.weight)).dot(b);
  const double aa = (a.cwiseProduct(s.weight)).dot(a);
  const double bb = (b.cwiseProduct(s.weight)).dot(b);
  return std::abs(ab) / std::sqrt(aa * bb);
}

}  // namespace detail

/// dν/dε for branch `branch` (index in the ascending list at ε). BranchCrossing when the branch is
/// closer than `branch_tolerance` to another eigenvalue or cannot be followed to ε ± step.
inline KatoReport kato_check(const OperatorFamily& family, double eps, int branch, double branch_tolerance,
                             double relative_step = 1e-4) {
  require(eps > 0.0 && relative_step > 0.0, ErrorKind::InvalidArgument, "eps and step must be positive");
  const BranchSample centre = family(eps);
  require(branch >= 0 && branch < centre.values.size(), ErrorKind::InvalidArgument, "branch index out of range");
  KatoReport out;
  out.eps = eps;
  out.step = relative_step * eps;
  out.value = centre.values[branch];
  out.isolation = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < centre.values.size(); ++k)
    if (k != branch) out.isolation = std::min(out.isolation, std::abs(centre.values[k] - out.value));
  if (out.isolation < branch_tolerance) {
    std::ostringstream msg;
    msg << "branch " << branch << " at eps=" << eps << " is within " << out.isolation << " of another eigenvalue";
    fail(ErrorKind::BranchCrossing, msg.str());
  }
  const Eigen::VectorXd x = centre.vectors.col(branch);
  out.overlap = 1.0;
  double side[2];
  for (int s = 0; s < 2; ++s) {
    const double e = eps + (s == 0 ? -out.step : out.step);
    const BranchSample sample = family(e);
    Eigen::Index best = -1, nearest = 0;
    double best_overlap = -1.0;
    for (Eigen::Index k = 0; k < sample.values.size(); ++k) {
      const double o = detail::overlap(sample, x, sample.vectors.col(k));
      if (o > best_overlap) best_overlap = o, best = k;
      if (std::abs(sample.values[k] - out.value) < std::abs(sample.values[nearest] - out.value)) nearest = k;
    }
    if (best < 0 || best_overlap < 0.9 || best != nearest) {
      std::ostringstream msg;
      msg << "branch " << branch << " lost at eps=" << e << " (overlap " << best_overlap << ")";
      fail(ErrorKind::BranchCrossing, msg.str());
    }
    out.overlap = std::min(out.overlap, best_overlap);
    side[s] = sample.values[best];
  }
  out.derivative = (side[1] - side[0]) / (2.0 * out.step);
  out.constant = out.derivative * eps * eps * eps;
  return out;
}

/// The model operator 𝓛_ε restricted to the lattice points (i, j), j < levels: basis vectors are
/// indexed by (i, j) so branches are followed exactly.
inline OperatorFamily model_family(const FiberSpectrum& fiber, const manifold::ManifoldSpectrum& base, int levels) {
  require(levels >= 1 && levels <= int(base.levels().size()), ErrorKind::RangeExceeded, "not enough base levels");
  return [fiber, base, levels](double eps) {
    const Eigen::Index size = Eigen::Index(fiber.size()) * levels;
    Eigen::VectorXd raw(size);
    for (std::size_t i = 0; i < fiber.size(); ++i)
      for (int j = 0; j < levels; ++j) raw[Eigen::Index(i) * levels + j] = fiber[i].value / (eps * eps) + base.levels()[j].value;
    std::vector<Eigen::Index> order(size);
    for (Eigen::Index k = 0; k < size; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return raw[a] < raw[b]; });
    BranchSample s;
    s.values.resize(size);
    s.vectors = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index k = 0; k < size; ++k) {
      s.values[k] = raw[order[k]];
      s.vectors(order[k], k) = 1.0;
    }
    return s;
  };
}

}  // namespace tubesol::resonance

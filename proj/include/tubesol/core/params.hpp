#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include "tubesol/core/error.hpp"

namespace tubesol {

/// Dimensions and exponent of Δu + u^p = 0 on a tube about a k-dimensional
/// submanifold of R^m. The fiber (normal) dimension is n = m - k.
struct ProblemParams {
  int n = 1;       ///< fiber dimension
  double p = 3.0;  ///< nonlinearity exponent
  int k = 1;       ///< dimension of the base manifold

  int m() const { return n + k; }

  /// (n+2)/(n-2) for n >= 3, +infinity otherwise.
  double critical_exponent() const {
    return n >= 3 ? double(n + 2) / double(n - 2) : std::numeric_limits<double>::infinity();
  }

  /// True when a positive radial ground state exists on the unit n-ball.
  bool subcritical() const { return p < critical_exponent(); }

  /// Exponent of ε in the ansatz amplitude, ε^{-2/(p-1)}.
  double amplitude_exponent() const { return -2.0 / (p - 1.0); }

  void validate() const {
    std::ostringstream msg;
    if (n < 1) {
      msg << "fiber dimension n must be >= 1, got " << n;
      fail(ErrorKind::InvalidArgument, msg.str());
    }
    if (k < 1) {
      msg << "manifold dimension k must be >= 1, got " << k;
      fail(ErrorKind::InvalidArgument, msg.str());
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
      msg << "exponent p must be finite and > 1, got " << p;
      fail(ErrorKind::InvalidArgument, msg.str());
    }
  }
};

}  // namespace tubesol

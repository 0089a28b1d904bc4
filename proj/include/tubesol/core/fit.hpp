#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "tubesol/core/error.hpp"

namespace tubesol::fit {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y ≈ slope·x + intercept.
inline Line least_squares(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument, "need >= 2 paired samples");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  require(denom != 0.0, ErrorKind::InvalidArgument, "degenerate abscissae");
  Line line;
  line.slope = (n * sxy - sx * sy) / denom;
  line.intercept = (sy - line.slope * sx) / n;
  return line;
}

/// Exponent of a power law y ≈ C·x^slope from positive samples.
inline Line log_log(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::InvalidArgument, "log-log fit needs positive samples");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly);
}

/// n points log-spaced from lo to hi inclusive.
inline std::vector<double> log_space(double lo, double hi, int n) {
  require(lo > 0.0 && hi > lo && n >= 2, ErrorKind::InvalidArgument, "bad log-space range");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace tubesol::fit

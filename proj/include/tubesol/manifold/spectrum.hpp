#pragma once

// Laplace–Beltrami spectra of closed model manifolds.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <type_traits>
#include <variant>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/fit.hpp"

namespace tubesol::manifold {

struct Circle {
  double radius = 1.0;
};

/// ℝ^k / (L_1 ℤ × … × L_k ℤ).
struct FlatTorus {
  std::vector<double> lengths;
};

/// Round k-sphere of the given radius.
struct Sphere {
  int dim = 2;
  double radius = 1.0;
};

/// Closed curve known only through samples; its spectrum is that of a circle of equal length.
struct NumericCurve {
  double length = 2.0 * std::numbers::pi;
};

using Family = std::variant<Circle, FlatTorus, Sphere, NumericCurve>;

struct Level {
  double value = 0.0;
  int multiplicity = 1;
};

class ManifoldSpectrum {
 public:
  ManifoldSpectrum(Family family, int dim, std::vector<Level> levels, double range_limit, double weyl_constant,
                   int count)
      : family_(std::move(family)), dim_(dim), levels_(std::move(levels)), range_limit_(range_limit),
        weyl_constant_(weyl_constant) {
    for (const auto& lv : levels_)
      for (int i = 0; i < lv.multiplicity && int(eigenvalues_.size()) < count; ++i) eigenvalues_.push_back(lv.value);
  }

  const Family& family() const { return family_; }
  int dim() const { return dim_; }
  /// Distinct eigenvalues with multiplicity, ascending; complete below range_limit().
  const std::vector<Level>& levels() const { return levels_; }
  /// Every eigenvalue strictly below this value is listed in levels().
  double range_limit() const { return range_limit_; }
  /// The first `count` eigenvalues repeated by multiplicity.
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// c in N(λ) ~ c·λ^{k/2}.
  double weyl_constant() const { return weyl_constant_; }

 private:
  Family family_;
  int dim_;
  std::vector<Level> levels_;
  double range_limit_;
  double weyl_constant_;
  std::vector<double> eigenvalues_;
};

namespace detail {

inline double unit_ball_volume(int k) { return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0); }

inline double sphere_area(int k, double radius) {  // |S^k| R^k
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1)) * std::pow(radius, k);
}

inline long binom(long top, long bottom) {
  if (bottom < 0 || top < 0 || top < bottom) return 0;
  long out = 1;
  for (long i = 1; i <= bottom; ++i) out = out * (top - bottom + i) / i;
  return out;
}

struct Enumerated {
  std::vector<Level> levels;
  double range_limit;
};

// Levels of a family with value < cutoff (torus: <= cutoff), plus the exclusive completeness bound.
inline Enumerated circle_levels(double radius, double cutoff) {
  Enumerated out;
  int j = 0;
  for (;; ++j) {
    const double v = (j / radius) * (j / radius);
    if (v >= cutoff && j > 0) {
      out.range_limit = v;
      break;
    }
    out.levels.push_back({v, j == 0 ? 1 : 2});
  }
  return out;
}

inline Enumerated sphere_levels(int k, double radius, double cutoff) {
  Enumerated out;
  for (long l = 0;; ++l) {
    const double v = double(l) * double(l + k - 1) / (radius * radius);
    if (v >= cutoff && l > 0) {
      out.range_limit = v;
      break;
    }
    out.levels.push_back({v, int(binom(l + k, k) - binom(l + k - 2, k))});
  }
  return out;
}

inline Enumerated torus_levels(const std::vector<double>& lengths, double cutoff) {
  const int k = int(lengths.size());
  std::vector<long> bound(k), index(k);
  for (int i = 0; i < k; ++i) {
    bound[i] = long(std::floor(lengths[i] * std::sqrt(cutoff) / (2.0 * std::numbers::pi))) + 1;
    index[i] = -bound[i];
  }
  std::vector<double> values;
  while (true) {
    double v = 0.0;
    for (int i = 0; i < k; ++i) {
      const double w = 2.0 * std::numbers::pi * double(index[i]) / lengths[i];
      v += w * w;
    }
    if (v <= cutoff) values.push_back(v);
    int i = 0;
    while (i < k && index[i] == bound[i]) {
      index[i] = -bound[i];
      ++i;
    }
    if (i == k) break;
    ++index[i];
  }
  std::sort(values.begin(), values.end());
  Enumerated out;
  for (double v : values) {
    if (!out.levels.empty() && v - out.levels.back().value <= 1e-12 * std::max(1.0, v))
      ++out.levels.back().multiplicity;
    else
      out.levels.push_back({v, 1});
  }
  out.range_limit = std::nextafter(cutoff, HUGE_VAL);
  return out;
}

inline detail::Enumerated enumerate(const Family& family, double cutoff) {
  return std::visit(
      [cutoff](const auto& f) -> Enumerated {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return circle_levels(f.radius, cutoff);
        } else if constexpr (std::is_same_v<T, NumericCurve>) {
          return circle_levels(f.length / (2.0 * std::numbers::pi), cutoff);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return sphere_levels(f.dim, f.radius, cutoff);
        } else {
          return torus_levels(f.lengths, cutoff);
        }
      },
      family);
}

}  // namespace detail

/// Dimension k of the family.
inline int family_dim(const Family& family) {
  return std::visit(
      [](const auto& f) -> int {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Sphere>) return f.dim;
        else if constexpr (std::is_same_v<T, FlatTorus>) return int(f.lengths.size());
        else return 1;
      },
      family);
}

inline void validate(const Family& family) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Circle>) {
          require(f.radius > 0.0, ErrorKind::InvalidArgument, "circle radius must be positive");
        } else if constexpr (std::is_same_v<T, NumericCurve>) {
          require(f.length > 0.0, ErrorKind::InvalidArgument, "curve length must be positive");
        } else if constexpr (std::is_same_v<T, Sphere>) {
          if (f.dim < 1) fail(ErrorKind::UnsupportedFamily, "sphere dimension must be >= 1");
          require(f.radius > 0.0, ErrorKind::InvalidArgument, "sphere radius must be positive");
        } else {
          if (f.lengths.empty()) fail(ErrorKind::UnsupportedFamily, "flat torus needs at least one length");
          for (double l : f.lengths) require(l > 0.0, ErrorKind::InvalidArgument, "torus lengths must be positive");
        }
      },
      family);
}

/// Leading Weyl coefficient ω_k·vol(Λ)/(2π)^k.
inline double weyl_constant(const Family& family) {
  const int k = family_dim(family);
  const double volume = std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Circle>) return 2.0 * std::numbers::pi * f.radius;
        else if constexpr (std::is_same_v<T, NumericCurve>) return f.length;
        else if constexpr (std::is_same_v<T, Sphere>) return detail::sphere_area(f.dim, f.radius);
        else {
          double v = 1.0;
          for (double l : f.lengths) v *= l;
          return v;
        }
      },
      family);
  return detail::unit_ball_volume(k) * volume / std::pow(2.0 * std::numbers::pi, k);
}

/// All eigenvalues below `cutoff`, grouped by level.
inline ManifoldSpectrum spectrum_below(const Family& family, double cutoff) {
  validate(family);
  require(cutoff > 0.0, ErrorKind::InvalidArgument, "cutoff must be positive");
  auto e = detail::enumerate(family, cutoff);
  int total = 0;
  for (const auto& lv : e.levels) total += lv.multiplicity;
  return ManifoldSpectrum(family, family_dim(family), std::move(e.levels), e.range_limit, weyl_constant(family), total);
}

/// First `count` eigenvalues with multiplicity; levels() holds every complete level needed.
inline ManifoldSpectrum model_spectrum(const Family& family, int count) {
  validate(family);
  require(count >= 1, ErrorKind::InvalidArgument, "count must be >= 1");
  const int k = family_dim(family);
  const double c = weyl_constant(family);
  double cutoff = std::max(1.0, std::pow(2.0 * count / c, 2.0 / k));
  while (true) {
    auto e = detail::enumerate(family, cutoff);
    int total = 0;
    for (const auto& lv : e.levels) total += lv.multiplicity;
    if (total >= count) {
      // Keep only levels up to the one containing the count-th eigenvalue.
      int seen = 0;
      std::size_t keep = 0;
      while (seen < count) seen += e.levels[keep++].multiplicity;
      const double limit = keep < e.levels.size() ? e.levels[keep].value : e.range_limit;
      e.levels.resize(keep);
      return ManifoldSpectrum(family, k, std::move(e.levels), limit, c, count);
    }
    cutoff *= 2.0;
  }
}

/// #{j : λ_j <= lambda} with multiplicity.
inline long weyl_count(const ManifoldSpectrum& spec, double lambda) {
  if (!(lambda < spec.range_limit())) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " is beyond the computed range (< " << spec.range_limit() << ")";
    fail(ErrorKind::RangeExceeded, msg.str());
  }
  long n = 0;
  for (const auto& lv : spec.levels()) {
    if (lv.value > lambda) break;
    n += lv.multiplicity;
  }
  return n;
}

/// Fitted exponent of N(λ) ∝ λ^s over `samples` log-spaced points in [lo, hi].
inline double weyl_exponent(const ManifoldSpectrum& spec, double lo, double hi, int samples = 24) {
  const auto grid = fit::log_space(lo, hi, samples);
  std::vector<double> counts;
  for (double l : grid) counts.push_back(double(weyl_count(spec, l)));
  return fit::log_log(grid, counts).slope;
}

}  // namespace tubesol::manifold

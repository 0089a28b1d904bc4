#pragma once

// Model lattice μ_i/ε² + λ_j, its resonances, Morse counts, gap and the admissible set S_N.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "tubesol/core/error.hpp"
#include "tubesol/core/fit.hpp"
#include "tubesol/manifold/spectrum.hpp"
#include "tubesol/radial/spectrum.hpp"

namespace tubesol::resonance {

/// Relative tolerance below which a lattice value counts as zero: |value| < 1e-10·ε⁻².
inline constexpr double kResonanceTolerance = 1e-10;

/// Fiber eigenvalues μ_i ascending, with multiplicities (the merged radial spectrum).
using FiberSpectrum = std::vector<radial::SpectrumEntry>;

struct LatticePoint {
  int i = 0;             ///< fiber index in the merged fiber spectrum
  int j = 0;             ///< base level index
  int multiplicity = 1;  ///< fiber multiplicity × base multiplicity
  double mu = 0.0;
  double lambda = 0.0;

  double value(double eps) const { return mu / (eps * eps) + lambda; }
  double derivative(double eps) const { return -2.0 * mu / (eps * eps * eps); }
};

namespace detail {

inline void require_positive_eps(double eps) {
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::InvalidArgument, "eps must be positive");
}

inline void require_base_range(const manifold::ManifoldSpectrum& base, double needed) {
  if (!(base.range_limit() > needed)) {
    std::ostringstream msg;
    msg << "base spectrum is complete only below " << base.range_limit() << ", need " << needed;
    fail(ErrorKind::RangeExceeded, msg.str());
  }
}

}  // namespace detail

/// Lattice values below `cutoff`, sorted ascending.
inline std::vector<LatticePoint> lattice_eigenvalues(const FiberSpectrum& fiber, const manifold::ManifoldSpectrum& base,
                                                     double eps, double cutoff) {
  detail::require_positive_eps(eps);
  require(!fiber.empty(), ErrorKind::InvalidArgument, "empty fiber spectrum");
  const double e2 = eps * eps;
  if (!(fiber.back().value / e2 >= cutoff)) {
    std::ostringstream msg;
    msg << "fiber spectrum ends at " << fiber.back().value << ", too shallow for cutoff " << cutoff << " at eps=" << eps;
    fail(ErrorKind::RangeExceeded, msg.str());
  }
  detail::require_base_range(base, cutoff - fiber.front().value / e2);
  std::vector<LatticePoint> out;
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    const double mu = fiber[i].value;
    for (std::size_t j = 0; j < base.levels().size(); ++j) {
      const auto& lv = base.levels()[j];
      if (!(mu / e2 + lv.value < cutoff)) break;
      out.push_back({int(i), int(j), fiber[i].multiplicity * lv.multiplicity, mu, lv.value});
    }
  }
  std::stable_sort(out.begin(), out.end(), [eps](const auto& a, const auto& b) { return a.value(eps) < b.value(eps); });
  return out;
}

struct Resonance {
  double eps = 0.0;  ///< ε* = √(−μ₀/λ_j)
  int j = 0;         ///< base level index
  double lambda = 0.0;
  int multiplicity = 1;
};

/// Resonances in [eps_min, eps_max], sorted descending.
inline std::vector<Resonance> resonance_set(double mu0, const manifold::ManifoldSpectrum& base, double eps_min, double eps_max) {
  require(mu0 < 0.0, ErrorKind::InvalidArgument, "resonances need a negative ground eigenvalue");
  require(eps_min > 0.0 && eps_max >= eps_min, ErrorKind::InvalidArgument, "invalid eps range");
  detail::require_base_range(base, -mu0 / (eps_min * eps_min));
  std::vector<Resonance> out;
  for (std::size_t j = 0; j < base.levels().size(); ++j) {
    const auto& lv = base.levels()[j];
    if (lv.value <= 0.0) continue;
    const double e = std::sqrt(-mu0 / lv.value);
    if (e < eps_min) break;
    if (e <= eps_max) out.push_back({e, int(j), lv.value, lv.multiplicity});
  }
  return out;
}

/// #{negative lattice values} with multiplicity; OnResonance when a value is numerically zero.
inline long morse_index_model(const FiberSpectrum& fiber, const manifold::ManifoldSpectrum& base, double eps) {
  const double tol = kResonanceTolerance / (eps * eps);
  long count = 0;
  for (const auto& pt : lattice_eigenvalues(fiber, base, eps, tol)) {
    const double v = pt.value(eps);
    if (std::abs(v) < tol) {
      std::ostringstream msg;
      msg << "lattice value (" << pt.i << "," << pt.j << ") = " << v << " is numerically zero at eps=" << eps;
      fail(ErrorKind::OnResonance, msg.str());
    }
    count += pt.multiplicity;
  }
  return count;
}

enum class GapPolicy {
  Strict,      ///< OnResonance when the gap is numerically zero
  Permissive,  ///< return the (possibly zero) gap
};

/// δ(ε) = min over the lattice of |μ_i/ε² + λ_j|.
inline double spectral_gap(const FiberSpectrum& fiber, const manifold::ManifoldSpectrum& base, double eps,
                           GapPolicy policy = GapPolicy::Strict) {
  detail::require_positive_eps(eps);
  const double e2 = eps * eps;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : fiber) {
    const double a = f.value / e2;
    if (a >= 0.0) {
      best = std::min(best, a);  // λ₀ = 0 attains the minimum
      continue;
    }
    // λ_j nearest to −a: beyond −a + best nothing can improve.
    detail::require_base_range(base, -a + std::min(best, std::abs(a)));
    for (const auto& lv : base.levels()) {
      best = std::min(best, std::abs(a + lv.value));
      if (lv.value > -a + best) break;
    }
  }
  if (policy == GapPolicy::Strict && best < kResonanceTolerance / e2) {
    std::ostringstream msg;
    msg << "eps=" << eps << " is a resonance (gap " << best << ")";
    fail(ErrorKind::OnResonance, msg.str());
  }
  return best;
}

struct Interval {
  double left = 0.0;
  double right = 0.0;
  double length() const { return std::max(0.0, right - left); }
};

/// Kept and excluded parts of one window (left, right] after removing left^N-neighborhoods.
struct WindowSplit {
  Interval window;
  std::vector<Interval> kept;
  std::vector<Interval> excluded;
};

inline WindowSplit split_window(double left, double right, const std::vector<double>& resonances, int N) {
  require(0.0 < left && left < right, ErrorKind::InvalidArgument, "invalid window");
  const double radius = std::pow(left, N);
  std::vector<Interval> cut;
  for (double r : resonances) {
    const Interval c{std::max(left, r - radius), std::min(right, r + radius)};
    if (c.right > c.left) cut.push_back(c);
  }
  std::sort(cut.begin(), cut.end(), [](const auto& a, const auto& b) { return a.left < b.left; });
  WindowSplit out;
  out.window = {left, right};
  for (const auto& c : cut) {
    if (!out.excluded.empty() && c.left <= out.excluded.back().right) out.excluded.back().right = std::max(out.excluded.back().right, c.right);
    else out.excluded.push_back(c);
  }
  double cursor = left;
  for (const auto& c : out.excluded) {
    if (c.left > cursor) out.kept.push_back({cursor, c.left});
    cursor = std::max(cursor, c.right);
  }
  if (cursor < right) out.kept.push_back({cursor, right});
  return out;
}

struct AdmissibleSet {
  int N = 0;
  double eps_floor = 0.0;  ///< windows cover (eps_floor, eps_max]
  double eps_max = 0.0;
  std::vector<Interval> intervals;  ///< kept, ascending
  std::vector<Interval> excluded;   ///< removed, ascending

  bool contains(double eps) const {
    return std::any_of(intervals.begin(), intervals.end(), [eps](const auto& iv) { return iv.left < eps && eps <= iv.right; });
  }
  /// Excluded measure in (eps_floor, ε], i.e. (ε − eps_floor) − meas(S_N ∩ (eps_floor, ε]).
  double density_defect(double eps) const {
    double out = 0.0;
    for (const auto& c : excluded) out += std::max(0.0, std::min(c.right, eps) - c.left);
    return out;
  }
};

/// S_N over windows (eps_max·2^{−ℓ−1}, eps_max·2^{−ℓ}] down to eps_floor; the left endpoint of each
/// window sets the exclusion radius left^N.
inline AdmissibleSet admissible_set(double mu0, const manifold::ManifoldSpectrum& base, int N, double eps_max,
                                    double eps_floor) {
  require(N >= 1, ErrorKind::InvalidArgument, "N must be >= 1");
  require(0.0 < eps_floor && eps_floor < eps_max, ErrorKind::InvalidArgument, "need 0 < eps_floor < eps_max");
  AdmissibleSet out;
  out.N = N;
  out.eps_max = eps_max;
  double right = eps_max;
  while (right > eps_floor) {
    const double left = 0.5 * right;
    const double radius = std::pow(left, N);
    // Once the radius reaches left every smaller resonance cuts (left, left + r], so only the largest
    // resonance below left matters; widen the search by halving until one shows up.
    double lower = left - radius;
    std::vector<Resonance> found;
    if (lower > 0.0) {
      found = resonance_set(mu0, base, lower, right + radius);
    } else {
      lower = 0.5 * left;
      for (;;) {
        found = resonance_set(mu0, base, lower, right + radius);
        if (std::any_of(found.begin(), found.end(), [left](const auto& r) { return r.eps < left; }) || lower < eps_floor * 1e-3)
          break;
        lower *= 0.5;
      }
    }
    std::vector<double> near;
    for (const auto& r : found) near.push_back(r.eps);
    const auto split = split_window(left, right, near, N);
    if (split.kept.empty()) {
      std::ostringstream msg;
      msg << "window (" << left << ", " << right << "] is entirely excluded with N=" << N;
      fail(ErrorKind::EmptyWindow, msg.str());
    }
    out.intervals.insert(out.intervals.end(), split.kept.begin(), split.kept.end());
    out.excluded.insert(out.excluded.end(), split.excluded.begin(), split.excluded.end());
    right = left;
  }
  out.eps_floor = right;
  const auto by_left = [](const auto& a, const auto& b) { return a.left < b.left; };
  std::sort(out.intervals.begin(), out.intervals.end(), by_left);
  std::sort(out.excluded.begin(), out.excluded.end(), by_left);
  return out;
}

/// Fitted exponent s of density_defect(ε) ≈ C ε^s on log-spaced samples; defect/ε^α → 0 for α < s.
inline double defect_exponent(const AdmissibleSet& set, double lo, double hi, int samples = 24) {
  std::vector<double> x, y;
  for (double e : fit::log_space(lo, hi, samples)) {
    const double d = set.density_defect(e);
    if (d > 0.0) {
      x.push_back(e);
      y.push_back(d);
    }
  }
  require(x.size() >= 2, ErrorKind::InvalidArgument, "defect vanishes on the sampled range");
  return fit::log_log(x, y).slope;
}

}  // namespace tubesol::resonance

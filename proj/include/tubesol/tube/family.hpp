#pragma once

// ε ↦ low spectrum of the assembled L̃_{ε,i} about a planar circle, as an operator family for
// branch tracking. The rescaled grid is ε-independent, so eigenvectors are comparable across ε.

#include <Eigen/Dense>

#include "tubesol/resonance/kato.hpp"
#include "tubesol/tube/iteration.hpp"
#include "tubesol/tube/linearized.hpp"

namespace tubesol::tube {

inline resonance::OperatorFamily circle_family(const radial::RadialProfile& profile, double radius, int nt, int depth,
                                               int count) {
  return [profile, radius, nt, depth, count](double eps) {
    const TubeGrid g(profile.params().n, eps, profile.intervals(), nt, 2.0 * std::numbers::pi * radius);
    const TubeOperator op = circle_operator(g, radius);
    const auto seq = iterate_approximation(op, profile, depth);
    const LinearizedOperator lin(op, seq.approximation(depth), profile.params().p);
    const auto pairs = lin.lowest(count);
    resonance::BranchSample s;
    const int F = g.free_count(), first = g.first_free();
    s.values.resize(Eigen::Index(pairs.size()));
    s.vectors.resize(Eigen::Index(g.nt()) * F, Eigen::Index(pairs.size()));
    s.weight.resize(Eigen::Index(g.nt()) * F);
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      s.values[Eigen::Index(c)] = pairs[c].value;
      for (int i = 0; i < g.nt(); ++i)
        for (int k = 0; k < F; ++k) s.vectors(Eigen::Index(i) * F + k, Eigen::Index(c)) = pairs[c].vector(i, first + k);
    }
    for (int i = 0; i < g.nt(); ++i)
      for (int k = 0; k < F; ++k) s.weight[Eigen::Index(i) * F + k] = lin.weight()(i, first + k);
    return s;
  };
}

}  // namespace tubesol::tube

#pragma once

// Fixture cache for ground states and fiber spectra: `r,U` and `mode,index,eigenvalue`.

#include <string>
#include <vector>

#include "tubesol/core/csv.hpp"
#include "tubesol/radial/ground_state.hpp"
#include "tubesol/radial/spectrum.hpp"

namespace tubesol::radial {

inline csv::Table profile_table(const RadialProfile& profile) {
  csv::Table t;
  t.header = {"r", "U"};
  for (Eigen::Index j = 0; j < profile.values().size(); ++j) t.rows.push_back({profile.nodes()[j], profile.values()[j]});
  return t;
}

inline csv::Table spectrum_table(const std::vector<ModeSpectrum>& modes) {
  csv::Table t;
  t.header = {"mode", "index", "eigenvalue"};
  for (const auto& m : modes)
    for (Eigen::Index i = 0; i < m.eigenvalues.size(); ++i) t.rows.push_back({double(m.mode), double(i), m.eigenvalues[i]});
  return t;
}

/// Values of a cached `r,U` table, checked against the expected node count.
inline Eigen::VectorXd read_profile_values(const csv::Table& t, int intervals) {
  const int r = t.column("r"), u = t.column("U");
  require(int(t.rows.size()) == intervals + 1, ErrorKind::IoError, "cached profile has the wrong number of nodes");
  Eigen::VectorXd out(intervals + 1);
  for (int j = 0; j <= intervals; ++j) {
    require(std::abs(t.rows[j][r] - double(j) / intervals) < 1e-12, ErrorKind::IoError, "cached profile grid differs");
    out[j] = t.rows[j][u];
  }
  return out;
}

}  // namespace tubesol::radial

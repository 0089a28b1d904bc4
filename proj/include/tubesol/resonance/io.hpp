#pragma once

// `eps_star,j` resonances, `left,right` admissible intervals, `eps,gap,defect,morse_index` sweeps.

#include <vector>

#include "tubesol/core/csv.hpp"
#include "tubesol/resonance/lattice.hpp"

namespace tubesol::resonance {

inline csv::Table resonance_table(const std::vector<Resonance>& set) {
  csv::Table t;
  t.header = {"eps_star", "j"};
  for (const auto& r : set) t.rows.push_back({r.eps, double(r.j)});
  return t;
}

inline csv::Table interval_table(const std::vector<Interval>& intervals) {
  csv::Table t;
  t.header = {"left", "right"};
  for (const auto& iv : intervals) t.rows.push_back({iv.left, iv.right});
  return t;
}

struct SweepRow {
  double eps = 0.0;
  double gap = 0.0;
  double defect = 0.0;
  long morse_index = 0;
};

inline csv::Table sweep_table(const std::vector<SweepRow>& rows) {
  csv::Table t;
  t.header = {"eps", "gap", "defect", "morse_index"};
  for (const auto& r : rows) t.rows.push_back({r.eps, r.gap, r.defect, double(r.morse_index)});
  return t;
}

}  // namespace tubesol::resonance

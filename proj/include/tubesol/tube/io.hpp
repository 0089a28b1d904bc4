#pragma once

// Solution `t,z,u` and diagnostics `eps,i,residual,ratio,gap,morse_index,contraction_factor` tables.

#include "tubesol/core/csv.hpp"
#include "tubesol/tube/grid.hpp"

namespace tubesol::tube {

inline csv::Table solution_table(const TubeGrid& g, const TubeField& u) {
  check_field(g, u);
  csv::Table t;
  t.header = {"t", "z", "u"};
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nodes(); ++j) t.rows.push_back({g.t(i), g.z(j), u(i, j)});
  return t;
}

struct DiagnosticsRow {
  double eps = 0.0;
  int i = 0;
  double residual = 0.0;
  double ratio = 0.0;
  double gap = 0.0;
  long morse_index = 0;
  double contraction_factor = 0.0;
};

inline csv::Table diagnostics_table(const std::vector<DiagnosticsRow>& rows) {
  csv::Table t;
  t.header = {"eps", "i", "residual", "ratio", "gap", "morse_index", "contraction_factor"};
  for (const auto& r : rows)
    t.rows.push_back({r.eps, double(r.i), r.residual, r.ratio, r.gap, double(r.morse_index), r.contraction_factor});
  return t;
}

}  // namespace tubesol::tube

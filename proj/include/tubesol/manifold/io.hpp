#pragma once

#include <cmath>
#include <string>

#include "tubesol/core/csv.hpp"
#include "tubesol/manifold/curve.hpp"
#include "tubesol/manifold/spectrum.hpp"

namespace tubesol::manifold {

/// One row per distinct level: `index,eigenvalue,multiplicity`.
inline csv::Table spectrum_table(const ManifoldSpectrum& spec) {
  csv::Table t;
  t.header = {"index", "eigenvalue", "multiplicity"};
  for (std::size_t i = 0; i < spec.levels().size(); ++i)
    t.rows.push_back({double(i), spec.levels()[i].value, double(spec.levels()[i].multiplicity)});
  return t;
}

/// Reads `t,x1,…,xm` samples (uniform in t, one period, no repeated endpoint) and builds the frame.
inline EmbeddedCurve read_curve(const std::string& path) {
  const csv::Table t = csv::read(path);
  require(t.header.size() >= 3 && t.header[0] == "t", ErrorKind::IoError, "curve CSV must start with t,x1,x2");
  const int m = int(t.header.size()) - 1;
  const int N = int(t.rows.size());
  require(N >= 8, ErrorKind::IoError, "curve CSV needs at least 8 samples");
  const double dt = t.rows[1][0] - t.rows[0][0];
  for (int j = 1; j < N; ++j)
    require(std::abs(t.rows[j][0] - t.rows[j - 1][0] - dt) <= 1e-9 * std::abs(dt), ErrorKind::IoError,
            "curve samples must be uniform in t");
  Eigen::MatrixXd pts(N, m);
  for (int j = 0; j < N; ++j)
    for (int a = 0; a < m; ++a) pts(j, a) = t.rows[j][a + 1];
  return build_frame(pts, dt * N, m);
}

inline csv::Table curve_table(const EmbeddedCurve& c) {
  csv::Table t;
  t.header = {"t"};
  for (int a = 0; a < c.ambient_dim(); ++a) t.header.push_back("x" + std::to_string(a + 1));
  for (int j = 0; j < c.samples(); ++j) {
    std::vector<double> row{c.parameter(j)};
    for (int a = 0; a < c.ambient_dim(); ++a) row.push_back(c.points()(j, a));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace tubesol::manifold

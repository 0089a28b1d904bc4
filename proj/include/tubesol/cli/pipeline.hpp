#pragma once

// Subcommand pipelines. Each returns named tables; the front-end tags and writes them.

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tubesol/cli/config.hpp"
#include "tubesol/core/csv.hpp"
#include "tubesol/manifold/io.hpp"
#include "tubesol/oracle/radial_oracle.hpp"
#include "tubesol/pohozaev/identity.hpp"
#include "tubesol/radial/io.hpp"
#include "tubesol/resonance/io.hpp"
#include "tubesol/resonance/kato.hpp"
#include "tubesol/tube/family.hpp"
#include "tubesol/tube/io.hpp"
#include "tubesol/tube/picard.hpp"

namespace tubesol::cli {

/// File name → contents. Pohozaev reports carry a string column, so artifacts are text.
using Artifacts = std::map<std::string, std::string>;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"ground-state", "spectrum", "resonance", "morse-sweep", "construct",
                                              "kato",         "pohozaev", "fixtures",  "all"};
  return names;
}

/// Applies fn to every point on a small thread pool; results keep the input order and the first
/// failure (in input order) is rethrown.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& points, Fn&& fn) -> std::vector<decltype(fn(points.front()))> {
  using R = decltype(fn(points.front()));
  std::vector<std::optional<R>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next++) < points.size();) {
      try {
        results[k].emplace(fn(points[k]));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), unsigned(points.size())));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  std::vector<R> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    out.push_back(std::move(*results[k]));
  }
  return out;
}

namespace detail {

inline std::string render(const csv::Table& t) {
  std::ostringstream out;
  csv::write(out, t);
  return out.str();
}

inline radial::RadialProfile profile(const RunConfig& c) { return radial::solve_ground_state(c.params, 1e-13, c.nz); }

inline resonance::FiberSpectrum fiber_spectrum(const radial::RadialProfile& prof) {
  return radial::merged_spectrum(radial::linearized_spectrum(prof, 2, 4));
}

inline double length(const RunConfig& c) { return 2.0 * std::numbers::pi * c.radius; }

/// Odd t-sample count resolving every base mode up to the resonant one, √(−μ₀)R/ε.
inline int samples(const RunConfig& c, double mu0, double eps) {
  if (c.nt) return *c.nt;
  int nt = 2 * int(std::ceil(c.radius * std::sqrt(-mu0) / eps)) + 3;
  if (nt % 2 == 0) ++nt;
  return std::max(nt, 9);
}

inline manifold::ManifoldSpectrum base_spectrum(const RunConfig& c, double mu0, double eps_min) {
  return manifold::spectrum_below(manifold::Circle{c.radius}, 2.0 * (-mu0) / (eps_min * eps_min) + 10.0);
}

inline tube::TubeOperator make_operator(const RunConfig& c, const tube::TubeGrid& g) {
  return c.geometry == Geometry::Circle ? tube::circle_operator(g, c.radius) : tube::straight_operator(g);
}

inline pohozaev::TubeGeometry make_geometry(const RunConfig& c, const tube::TubeGrid& g) {
  return c.geometry == Geometry::Circle ? pohozaev::circle_geometry(g, c.radius) : pohozaev::straight_geometry(g);
}

inline tube::ContractParameters contract(const RunConfig& c) {
  tube::ContractParameters k;
  k.i = c.i_max;
  k.N = c.N;
  k.N0 = c.N0;
  k.M = c.M;
  return k;
}

struct Construction {
  tube::TubeGrid grid;
  tube::ApproximationSequence sequence;
  tube::PicardResult solution;
};

inline Construction construct_at(const RunConfig& c, const radial::RadialProfile& prof, double mu0, double eps) {
  const tube::TubeGrid g(c.params.n, eps, c.nz, samples(c, mu0, eps), length(c));
  const tube::TubeOperator op = make_operator(c, g);
  tube::ApproximationSequence seq = tube::iterate_approximation(op, prof, c.i_max);
  tube::PicardOptions options;
  options.tol = c.tol;
  tube::PicardResult sol = tube::picard_solve(op, seq, contract(c), options);
  return {g, std::move(seq), std::move(sol)};
}

}  // namespace detail

inline Artifacts run_ground_state(const RunConfig& c) {
  const auto prof = detail::profile(c);
  return {{"ground_state.csv", detail::render(radial::profile_table(prof))},
          {"fiber_spectrum.csv", detail::render(radial::spectrum_table(radial::linearized_spectrum(prof, 2, 4)))}};
}

inline Artifacts run_spectrum(const RunConfig& c) {
  const double mu0 = radial::ground_eigenvalue(radial::linearized_spectrum(detail::profile(c), 1, 2));
  return {{"base_spectrum.csv", detail::render(manifold::spectrum_table(detail::base_spectrum(c, mu0, c.eps_lo)))}};
}

inline Artifacts run_resonance(const RunConfig& c) {
  const double mu0 = radial::ground_eigenvalue(radial::linearized_spectrum(detail::profile(c), 1, 2));
  const auto base = detail::base_spectrum(c, mu0, 0.5 * c.eps_lo);
  const auto set = resonance::admissible_set(mu0, base, c.N, c.eps_hi, c.eps_lo);
  return {{"resonances.csv", detail::render(resonance::resonance_table(resonance::resonance_set(mu0, base, c.eps_lo, c.eps_hi)))},
          {"admissible.csv", detail::render(resonance::interval_table(set.intervals))}};
}

inline Artifacts run_morse_sweep(const RunConfig& c) {
  const auto prof = detail::profile(c);
  const auto fiber = detail::fiber_spectrum(prof);
  const double mu0 = fiber.front().value;
  const auto base = detail::base_spectrum(c, mu0, 0.25 * c.eps_lo);
  const auto set = resonance::admissible_set(mu0, base, c.N, c.eps_hi, 0.5 * c.eps_lo);
  std::vector<resonance::SweepRow> rows;
  for (double e : c.sweep())
    rows.push_back({e, resonance::spectral_gap(fiber, base, e, resonance::GapPolicy::Permissive), set.density_defect(e),
                    resonance::morse_index_model(fiber, base, e)});
  return {{"morse_sweep.csv", detail::render(resonance::sweep_table(rows))}};
}

inline Artifacts run_construct(const RunConfig& c) {
  const auto prof = detail::profile(c);
  const double mu0 = radial::ground_eigenvalue(radial::linearized_spectrum(prof, 1, 2));
  const auto built = detail::construct_at(c, prof, mu0, c.eps);
  const tube::TubeOperator op = detail::make_operator(c, built.grid);
  std::vector<tube::DiagnosticsRow> rows;
  for (const auto& step : built.sequence.steps) {
    const tube::LinearizedOperator lin(op, built.sequence.approximation(step.index), c.params.p);
    rows.push_back({c.eps, step.index, step.residual, step.ratio, tube::discrete_gap(lin), tube::morse_index_discrete(lin),
                    built.solution.contraction_measured});
  }
  return {{"solution.csv", detail::render(tube::solution_table(built.grid, built.solution.u))},
          {"diagnostics.csv", detail::render(tube::diagnostics_table(rows))}};
}

inline Artifacts run_kato(const RunConfig& c) {
  require(c.geometry == Geometry::Circle && c.params.n == 1, ErrorKind::UnsupportedGeometry,
          "branch tracking is implemented for line-fiber circle tubes");
  const auto prof = detail::profile(c);
  const double mu0 = radial::ground_eigenvalue(radial::linearized_spectrum(prof, 1, 2));
  const int depth = std::min(c.i_max, 2);
  const auto reports = parallel_map(c.sweep(), [&](double e) {
    const auto family = tube::circle_family(prof, c.radius, detail::samples(c, mu0, e), depth, 3);
    return resonance::kato_check(family, e, 0, resonance::kResonanceTolerance / (e * e));
  });
  csv::Table t;
  t.header = {"eps", "value", "derivative", "model_derivative", "ratio", "overlap", "isolation"};
  for (const auto& r : reports) {
    const double model = -2.0 * mu0 / (r.eps * r.eps * r.eps);
    t.rows.push_back({r.eps, r.value, r.derivative, model, r.derivative / model, r.overlap, r.isolation});
  }
  return {{"kato.csv", detail::render(t)}};
}

inline Artifacts run_pohozaev(const RunConfig& c) {
  std::vector<pohozaev::ReportRow> rows;
  csv::Table poincare;
  poincare.header = {"eps", "poincare_ratio", "cauchy_schwarz_lhs", "cauchy_schwarz_rhs"};
  if (c.params.subcritical()) {
    // Identity on constructed solutions; the nonexistence theorem does not apply.
    const auto prof = detail::profile(c);
    const double mu0 = radial::ground_eigenvalue(radial::linearized_spectrum(prof, 1, 2));
    rows = parallel_map(c.sweep(), [&](double e) {
      const auto built = detail::construct_at(c, prof, mu0, e);
      pohozaev::ReportRow row;
      row.eps = e;
      row.coefficient = pohozaev::identity_coefficient(c.params.n, c.params.p);
      row.identity = pohozaev::integrated_identity(detail::make_geometry(c, built.grid), built.solution.u, c.params.p);
      return row;
    });
    for (const auto& r : rows)
      poincare.rows.push_back({r.eps, r.identity->poincare_ratio, r.identity->cauchy_schwarz_lhs, r.identity->cauchy_schwarz_rhs});
  } else {
    for (double e : c.sweep()) {
      const int nt = std::max(9, 2 * int(std::ceil(c.radius / e)) + 1);
      const auto curve = c.geometry == Geometry::Circle ? manifold::circle_curve(c.radius, c.params.n + 1, nt)
                                                        : manifold::straight_curve(detail::length(c), c.params.n + 1, nt);
      pohozaev::ReportRow row;
      row.eps = e;
      row.coefficient = pohozaev::identity_coefficient(c.params.n, c.params.p);
      row.certificate = pohozaev::nonexistence_certificate(c.params, e, fermi::frame_tensors(curve));
      rows.push_back(std::move(row));
    }
  }
  std::ostringstream report;
  pohozaev::write_report(report, rows);
  Artifacts out{{"pohozaev.csv", report.str()}};
  if (!poincare.rows.empty()) out["poincare.csv"] = detail::render(poincare);
  return out;
}

/// Seeded smooth random fields on the circle tube: `sample,lhs,rhs` of the Cauchy–Schwarz step.
inline csv::Table random_field_checks(const RunConfig& c, int count) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  const int nz = 64, nt = 9;
  const tube::TubeGrid g(1, c.eps, nz, nt, detail::length(c));
  const auto geo = c.geometry == Geometry::Circle ? pohozaev::circle_geometry(g, c.radius) : pohozaev::straight_geometry(g);
  csv::Table t;
  t.header = {"sample", "lhs", "rhs"};
  for (int k = 0; k < count; ++k) {
    // Low Fourier modes in t times sin(πq(s+1)/2) in the fiber.
    tube::TubeField u = g.zeros();
    for (int q = 1; q <= 3; ++q)
      for (int m = 0; m <= 2; ++m) {
        const double a = normal(rng), b = normal(rng);
        for (int i = 0; i < nt; ++i) {
          const double w = 2.0 * std::numbers::pi * m * g.t(i) / g.period();
          for (int j = 1; j < g.nodes() - 1; ++j)
            u(i, j) += (a * std::cos(w) + b * std::sin(w)) * std::sin(0.5 * std::numbers::pi * q * (g.s(j) + 1.0));
        }
      }
    const auto rep = pohozaev::integrated_identity(geo, u, c.params.p);
    t.rows.push_back({double(k), rep.cauchy_schwarz_lhs, rep.cauchy_schwarz_rhs});
  }
  return t;
}

/// Brute-force oracle values for the configured (n, p) and the seeded random-field checks.
inline Artifacts run_fixtures(const RunConfig& c) {
  Artifacts out;
  if (c.params.subcritical() && c.params.n <= 3) {
    const auto ref = oracle::extrapolated_reference(c.params, 4096);
    csv::Table t;
    t.header = {"n", "p", "intervals", "center", "boundary_slope", "mu0", "mu1"};
    t.rows.push_back({double(c.params.n), c.params.p, double(ref.intervals), ref.center, ref.boundary_slope, ref.mu0, ref.mu1});
    out["radial_oracle.csv"] = detail::render(t);
    const auto prof = detail::profile(c);
    const std::string key = "_n" + std::to_string(c.params.n) + "_p" + csv::format(c.params.p) + "_nz" + std::to_string(c.nz);
    out["ground_state" + key + ".csv"] = detail::render(radial::profile_table(prof));
    out["fiber_spectrum" + key + ".csv"] = detail::render(radial::spectrum_table(radial::linearized_spectrum(prof, 2, 4)));
  }
  out["random_fields.csv"] = detail::render(random_field_checks(c, 8));
  return out;
}

inline Artifacts run(const std::string& subcommand, const RunConfig& c) {
  static const std::map<std::string, std::function<Artifacts(const RunConfig&)>> table{
      {"ground-state", run_ground_state}, {"spectrum", run_spectrum}, {"resonance", run_resonance},
      {"morse-sweep", run_morse_sweep},   {"construct", run_construct}, {"kato", run_kato},
      {"pohozaev", run_pohozaev},         {"fixtures", run_fixtures}};
  if (subcommand == "all") {
    Artifacts out;
    const bool solvable = c.params.subcritical();
    for (const auto& [name, fn] : table) {
      if (!solvable && name != "pohozaev" && name != "fixtures") continue;
      if (name == "kato" && (c.geometry != Geometry::Circle || c.params.n != 1)) continue;
      out.merge(fn(c));
    }
    return out;
  }
  const auto it = table.find(subcommand);
  if (it == table.end()) fail(ErrorKind::ConfigError, "unknown subcommand '" + subcommand + "'");
  return it->second(c);
}

/// Writes every artifact under `dir` with a leading `# config_hash=<sha256>` line.
inline void write_artifacts(const std::filesystem::path& dir, const RunConfig& c, const Artifacts& artifacts) {
  std::filesystem::create_directories(dir);
  const std::string header = "# config_hash=" + config_hash(c) + "\n";
  for (const auto& [name, body] : artifacts) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorKind::IoError, "cannot write " + (dir / name).string());
    out << header << body;
  }
}

}  // namespace tubesol::cli

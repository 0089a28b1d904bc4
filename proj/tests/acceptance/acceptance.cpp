// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../common/radial_fixtures.hpp"
#include "tubesol/cli/pipeline.hpp"
#include "tubesol/core/fit.hpp"
#include "tubesol/tube/decomposition.hpp"

using namespace tubesol;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Collects the checks of one criterion with a short log.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) passed_ = false;
    log_ << (ok ? "  ok   " : "  FAIL ") << what << '\n';
  }
  bool passed() const { return passed_; }
  std::string log() const { return log_.str(); }

 private:
  bool passed_ = true;
  std::ostringstream log_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

bool relative_match(double value, double reference, double tol) {
  return std::abs(value - reference) <= tol * std::abs(reference);
}

// Circle R = 1, n = 1, p = 3: the shared sweep of the construction criteria.
struct SweepPoint {
  double eps;
  tube::ApproximationSequence sequence;
  tube::PicardResult solution;
  long morse_model;
  int morse_discrete;
  double rho;
};

struct CircleSweep {
  radial::RadialProfile profile;
  double mu0;
  resonance::AdmissibleSet admissible;
  std::vector<SweepPoint> points;
};

int samples_for(double mu0, double eps) { return 2 * int(std::ceil(std::sqrt(-mu0) / eps)) + 3; }

/// Moves log-spaced points into S_N when they fall in an excluded neighborhood.
std::vector<double> admissible_points(const resonance::AdmissibleSet& set, double lo, double hi, int count) {
  std::vector<double> out;
  for (double e : fit::log_space(lo, hi, count)) {
    if (!set.contains(e)) {
      double best = e, distance = std::numeric_limits<double>::infinity();
      for (const auto& iv : set.intervals) {
        const double mid = 0.5 * (iv.left + iv.right);
        if (std::abs(mid - e) < distance) distance = std::abs(mid - e), best = mid;
      }
      e = best;
    }
    out.push_back(e);
  }
  return out;
}

CircleSweep circle_sweep(int nz, double rho_threshold = 0.0) {
  CircleSweep s{radial::solve_ground_state({1, 3.0, 1}, 1e-13, nz), 0.0, {}, {}};
  const auto fiber = radial::merged_spectrum(radial::linearized_spectrum(s.profile, 1, 4));
  s.mu0 = fiber.front().value;
  const auto base = manifold::spectrum_below(manifold::Circle{1.0}, 2.0 * (-s.mu0) / (0.02 * 0.02) + 10.0);
  s.admissible = resonance::admissible_set(s.mu0, base, 4, 0.3, 0.04);
  const auto eps = admissible_points(s.admissible, 0.05, 0.3, 6);
  s.points = cli::parallel_map(eps, [&](double e) {
    const tube::TubeGrid g(1, e, nz, samples_for(s.mu0, e), kTwoPi);
    const tube::TubeOperator op = tube::circle_operator(g, 1.0);
    auto seq = tube::iterate_approximation(op, s.profile, 6);
    auto sol = tube::picard_solve(op, seq, tube::default_contract(1));
    const tube::LinearizedOperator lin(op, seq.approximation(6), 3.0);
    const auto low = lin.lowest(1).front();
    const double rho = tube::eigenfunction_decomposition(lin, low, s.profile, rho_threshold).ratio;
    return SweepPoint{e, std::move(seq), std::move(sol), resonance::morse_index_model(fiber, base, e),
                      tube::morse_index_discrete(lin), rho};
  });
  return s;
}

const CircleSweep& sweep128() {
  static const CircleSweep s = circle_sweep(128);
  return s;
}

std::vector<double> column(const CircleSweep& s, const std::function<double(const SweepPoint&)>& fn) {
  std::vector<double> out;
  for (const auto& pt : s.points) out.push_back(fn(pt));
  return out;
}

// 1. Ground state and fiber spectrum.
void ground_state(Verdict& v) {
  for (const auto& fx : test::kRadialFixtures) {
    const ProblemParams prm{fx.n, fx.p, 1};
    const std::string tag = "(n,p)=(" + std::to_string(fx.n) + "," + fmt(fx.p) + ")";
    const auto coarse = radial::solve_ground_state(prm, 1e-10, 512);
    v.check(coarse.residual() < 1e-8, tag + " residual at 512 nodes " + fmt(coarse.residual()) + " < 1e-8");
    const auto fine = radial::solve_ground_state(prm, 1e-13, 4096);
    const auto modes = radial::linearized_spectrum(fine, 2, 4);
    const auto merged = radial::merged_spectrum(modes);
    const double mu0 = merged[0].value, mu1 = merged[1].value;
    v.check(mu0 < 0.0 && 0.0 < mu1, tag + " mu0 = " + fmt(mu0) + " < 0 < mu1 = " + fmt(mu1));
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& e : merged) smallest = std::min(smallest, std::abs(e.value));
    v.check(smallest > 1e-6, tag + " min |mu_j| = " + fmt(smallest) + " > 1e-6");
    v.check(relative_match(fine.center_value(), fx.center, 1e-6) && relative_match(mu0, fx.mu0, 1e-6) &&
                relative_match(mu1, fx.mu1, 1e-6),
            tag + " U(0), mu0, mu1 at 4096 nodes match the dense oracle to 1e-6 relative");
  }
}

// 2. Exact ansatz on a flat tube.
void flat_control(Verdict& v) {
  for (int n : {1, 2}) {
    const auto prof = radial::solve_ground_state({n, 3.0, 1}, 1e-13, 128);
    const tube::TubeGrid g(n, 0.1, 128, 9, kTwoPi);
    const tube::TubeOperator op = tube::straight_operator(g);
    const auto seq = tube::iterate_approximation(op, prof, 6);
    const double scale = tube::sup_norm(seq.ubar);
    double worst = 0.0;
    for (const auto& c : seq.corrections) worst = std::max(worst, tube::sup_norm(c) / scale);
    const auto sol = tube::picard_solve(op, seq, tube::default_contract(1));
    const double diff = tube::sup_norm(sol.u - seq.ubar) / scale;
    v.check(worst <= 1e-12, "n=" + std::to_string(n) + " max |v_i|/|ubar| = " + fmt(worst));
    v.check(diff <= 1e-12, "n=" + std::to_string(n) + " |u - ubar|/|ubar| = " + fmt(diff));
  }
}

// 3. Residual ladder.
void residual_ladder(Verdict& v) {
  const auto& s = sweep128();
  const auto eps = column(s, [](const auto& pt) { return pt.eps; });
  std::string where;
  for (double e : eps) where += fmt(e) + " ";
  v.check(eps.size() == 6, "sweep eps = " + where);
  for (int i = 0; i <= 3; ++i) {
    const auto res = column(s, [i](const auto& pt) { return pt.sequence.steps[i].residual; });
    const double slope = fit::log_log(eps, res).slope, target = i - 2.0;
    v.check(std::abs(slope - target) <= 0.3, "i=" + std::to_string(i) + " slope " + fmt(slope) + " vs " + fmt(target) + " +- 0.3");
  }
}

// 4. Shape estimate.
void shape_estimate(Verdict& v) {
  const auto& s = sweep128();
  const auto eps = column(s, [](const auto& pt) { return pt.eps; });
  const auto err = column(s, [](const auto& pt) { return pt.solution.shape_error; });
  const double slope = fit::log_log(eps, err).slope;
  double constant = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) constant = std::max(constant, err[k] / eps[k]);
  v.check(slope >= 0.8, "fitted exponent of |u/ubar - 1| is " + fmt(slope) + " >= 0.8 (max C = " + fmt(constant) + ")");
  bool positive = true;
  for (const auto& pt : s.points) positive = positive && pt.solution.positive;
  v.check(positive, "converged solutions are positive");
}

// 5. Resonance and index laws.
void resonance_laws(Verdict& v) {
  const auto& s = sweep128();
  const auto base = manifold::spectrum_below(manifold::Circle{1.0}, 1e5);
  double worst = 0.0;
  for (const auto& r : resonance::resonance_set(s.mu0, base, 0.01, 3.0))
    worst = std::max(worst, std::abs(r.eps - std::sqrt(-s.mu0 / r.lambda)));
  v.check(worst <= 1e-10, "resonances match sqrt(-mu0/lambda_j), max error " + fmt(worst));
  bool agree = true;
  std::string listing;
  for (const auto& pt : s.points) {
    agree = agree && pt.morse_model == pt.morse_discrete;
    listing += std::to_string(pt.morse_discrete) + " ";
  }
  v.check(agree, "model and discrete Morse indices agree on the sweep: " + listing);
  const auto eps = column(s, [](const auto& pt) { return pt.eps; });
  const auto index = column(s, [](const auto& pt) { return double(pt.morse_discrete); });
  const double slope = fit::log_log(eps, index).slope;
  v.check(std::abs(slope + 1.0) <= 0.15, "index slope " + fmt(slope) + " = -1 +- 0.15");
  const auto wide = resonance::admissible_set(s.mu0, manifold::spectrum_below(manifold::Circle{1.0}, 1e6), 4, 0.5, 0.01);
  const double decay = resonance::defect_exponent(wide, 0.02, 0.5);
  v.check(decay > 2.5, "density defect ~ eps^" + fmt(decay) + ", so defect/eps^alpha -> 0 for alpha < N - k = 3 on the fit");
}

// 6. Eigenvalue derivatives.
void kato(Verdict& v) {
  const auto& s = sweep128();
  const auto fiber = radial::merged_spectrum(radial::linearized_spectrum(s.profile, 1, 4));
  const auto base = manifold::spectrum_below(manifold::Circle{1.0}, 1e4);
  const auto model = resonance::model_family(fiber, base, 6);
  double model_error = 0.0, worst_ratio = std::numeric_limits<double>::infinity();
  for (const auto& pt : s.points) {
    const double e = pt.eps, expected = -2.0 * s.mu0 / (e * e * e);
    const auto rep = resonance::kato_check(model, e, 0, 1e-6);
    model_error = std::max(model_error, std::abs(rep.derivative - expected) / expected);
  }
  v.check(model_error < 1e-6, "model branch derivative matches -2 mu0/eps^3, max relative error " + fmt(model_error));
  const auto perturbed = cli::parallel_map(column(s, [](const auto& pt) { return pt.eps; }), [&](double e) {
    const auto family = tube::circle_family(s.profile, 1.0, samples_for(s.mu0, e), 2, 3);
    return resonance::kato_check(family, e, 0, resonance::kResonanceTolerance / (e * e)).derivative / (-2.0 * s.mu0 / (e * e * e));
  });
  for (double r : perturbed) worst_ratio = std::min(worst_ratio, r);
  v.check(worst_ratio >= 0.5, "perturbed low branch derivative / (-2 mu0/eps^3) >= " + fmt(worst_ratio) + " >= 0.5");
}

// 7. Eigenfunction decomposition ratio.
void decomposition_ratio(Verdict& v) {
  const CircleSweep coarse = circle_sweep(64);
  const auto& fine = sweep128();
  for (const CircleSweep* s : {&coarse, &fine}) {
    const auto eps = column(*s, [](const auto& pt) { return pt.eps; });
    const auto rho = column(*s, [](const auto& pt) { return pt.rho; });
    const double slope = fit::log_log(eps, rho).slope;
    const double top = *std::max_element(rho.begin(), rho.end());
    const std::string tag = "nz=" + std::to_string(s->profile.intervals());
    v.check(slope > -0.25, tag + " log-log slope of rho vs eps " + fmt(slope) + " shows no growth as eps -> 0");
    v.check(top < 10.0, tag + " max rho " + fmt(top));
  }
  double spread = 0.0;
  for (std::size_t k = 0; k < fine.points.size(); ++k)
    spread = std::max(spread, std::abs(coarse.points[k].rho / fine.points[k].rho - 1.0));
  v.check(spread < 0.2, "rho agrees between resolutions within " + fmt(spread));
}

// 8. Pohozaev identity and nonexistence certificate.
void pohozaev_criterion(Verdict& v) {
  std::vector<double> rel;
  for (int nz : {128, 256}) {
    const auto prof = radial::solve_ground_state({1, 3.0, 1}, 1e-13, nz);
    const double eps = 0.2, mu0 = radial::ground_eigenvalue(radial::linearized_spectrum(prof, 1, 2));
    const tube::TubeGrid g(1, eps, nz, samples_for(mu0, eps), kTwoPi);
    const tube::TubeOperator op = tube::circle_operator(g, 1.0);
    const auto sol = tube::picard_solve(op, tube::iterate_approximation(op, prof, 6), tube::default_contract(1));
    rel.push_back(std::abs(pohozaev::integrated_identity(pohozaev::circle_geometry(g, 1.0), sol.u, 3.0).relative_residual()));
  }
  v.check(rel[0] < 1e-3, "nz=128 identity residual / int |grad u|^2 = " + fmt(rel[0]) + " < 1e-3");
  v.check(rel[1] <= 0.5 * rel[0], "nz=256 residual " + fmt(rel[1]) + " at most half of nz=128");
  double worst = 0.0;
  for (const auto& pt : sweep128().points) {
    const tube::TubeGrid g(1, pt.eps, 128, samples_for(sweep128().mu0, pt.eps), kTwoPi);
    worst = std::max(worst, std::abs(pohozaev::integrated_identity(pohozaev::circle_geometry(g, 1.0), pt.solution.u, 3.0).relative_residual()));
  }
  v.check(worst < 1e-3, "nz=128 relative residual over the sweep at most " + fmt(worst));

  int points = 0, wrong = 0;
  for (int n = 1; n <= 12; ++n)
    for (int k = 0; k < 10; ++k) {
      const double p = 1.25 + 0.75 * k;
      const double c = pohozaev::identity_coefficient(n, p), crit = ProblemParams{n, p, 1}.critical_exponent();
      const bool ok = p > crit ? c > 0.0 : (p < crit ? c < 0.0 : c == 0.0);
      wrong += ok ? 0 : 1;
      ++points;
    }
  v.check(wrong == 0 && points >= 100, "coefficient sign law on " + std::to_string(points) + " (n,p) points, " +
                                           std::to_string(wrong) + " mismatches");
  const auto curve = fermi::frame_tensors(manifold::circle_curve(1.0, 4, 33));
  const auto super = pohozaev::nonexistence_certificate({3, 7.0, 1}, 0.05, curve);
  v.check(std::isfinite(super.eps_bar) && super.eps_bar > 0.0 && super.verdict == pohozaev::Verdict::NoPositiveSolution,
          "(3,7): eps_bar = " + fmt(super.eps_bar) + ", verdict " + pohozaev::to_string(super.verdict) + " at eps = 0.05");
  const auto critical = pohozaev::nonexistence_certificate({3, 5.0, 1}, 0.05, curve);
  v.check(critical.verdict == pohozaev::Verdict::Inconclusive && critical.coefficient == 0.0,
          "(3,5): coefficient 0, verdict " + pohozaev::to_string(critical.verdict));
}

// 9. Poincare ratio for fixed rescaled shapes.
void poincare(Verdict& v) {
  for (int n : {1, 2}) {
    std::vector<double> ratios;
    for (double eps : fit::log_space(0.05, 0.3, 6)) {
      const tube::TubeGrid g(n, eps, 128, 9, kTwoPi);
      const auto prof = radial::solve_ground_state({n, 3.0, 1}, 1e-13, 128);
      ratios.push_back(pohozaev::poincare_check(pohozaev::straight_geometry(g), tube::ansatz(g, prof)));
    }
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::abs(r / ratios.front() - 1.0));
    v.check(spread < 1e-6, "n=" + std::to_string(n) + " ratio " + fmt(ratios.front()) + " varies by " + fmt(spread) + " < 1e-6");
  }
}

// 10. Determinism of the CLI.
std::string body(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::string first, rest;
  std::getline(in, first);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(Verdict& v) {
  const std::filesystem::path root = std::filesystem::current_path() / "determinism";
  std::filesystem::remove_all(root);
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"circle.conf", {"ground-state", "spectrum", "resonance", "morse-sweep", "construct", "kato", "pohozaev"}},
      {"supercritical.conf", {"pohozaev"}},
      {"flat.conf", {"construct"}}};
  int files = 0;
  for (const auto& [config, subs] : runs)
    for (const auto& sub : subs)
      for (const char* copy : {"a", "b"}) {
        const auto dir = root / copy / (config + "." + sub);
        const std::string cmd = std::string(TUBESOL_CLI_PATH) + " " + sub + " --config " + TUBESOL_CONFIG_DIR + "/" + config +
                                " --out " + dir.string() + " > /dev/null";
        v.check(std::system(cmd.c_str()) == 0, "run " + sub + " with " + config + " (" + copy + ")");
      }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto twin = root / "b" / std::filesystem::relative(entry.path(), root / "a");
    const bool same = std::filesystem::exists(twin) && body(entry.path()) == body(twin);
    v.check(same, "identical CSV body: " + std::filesystem::relative(entry.path(), root / "a").string());
    ++files;
  }
  v.check(files >= 10, std::to_string(files) + " artifacts compared");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"ground state and fiber spectrum", ground_state},
      {"exact ansatz on the flat tube", flat_control},
      {"residual ladder", residual_ladder},
      {"shape estimate", shape_estimate},
      {"resonance and index laws", resonance_laws},
      {"eigenvalue branch derivatives", kato},
      {"eigenfunction decomposition ratio", decomposition_ratio},
      {"Pohozaev identity and certificate", pohozaev_criterion},
      {"Poincare ratio", poincare},
      {"CLI determinism", determinism}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      criteria[k].second(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::cout << v.log();
    std::cout << "criterion " << k + 1 << " (" << criteria[k].first << "): " << (v.passed() ? "PASS" : "FAIL") << std::endl;
    failures += v.passed() ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

#include <random>
#include <sstream>

#include "support.hpp"
#include "tubesol/pohozaev/identity.hpp"
#include "tubesol/tube/iteration.hpp"
#include "tubesol/tube/picard.hpp"

using namespace tubesol;
using Catch::Approx;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sup_gradient_sq(const tube::TubeGrid& g, const tube::TubeField& u) {
  const tube::TubeField uz = pohozaev::detail::fiber_slope(g, u);
  const tube::TubeField ut = spectral::derivative_matrix(g.nt(), g.period()) * u;
  return (uz.array().square() + ut.array().square()).maxCoeff();
}

tube::TubeField interior_sup_mask(const tube::TubeGrid& g, tube::TubeField f) {
  // The two nodes next to each Dirichlet end use one-sided stencils; keep the estimate on the rest.
  for (int j = 0; j < g.nodes(); ++j)
    if (g.is_boundary(j) || (j == 1 && g.kind() == tube::FiberKind::Line) || j == g.nodes() - 2) f.col(j).setZero();
  return f;
}

}  // namespace

TEST_CASE("identity coefficient sign law", "[pohozaev]") {
  int points = 0;
  for (int n = 1; n <= 12; ++n)
    for (double p : {1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 9.0, 13.0}) {
      const double c = pohozaev::identity_coefficient(n, p);
      const double crit = ProblemParams{n, p, 1}.critical_exponent();
      INFO("n=" << n << " p=" << p);
      if (p > crit) CHECK(c > 0.0);
      else if (p < crit) CHECK(c < 0.0);
      else CHECK(c == 0.0);
      ++points;
    }
  CHECK(points >= 100);
  CHECK(pohozaev::identity_coefficient(3, 5.0) == 0.0);
  CHECK(pohozaev::identity_coefficient(4, 3.0) == 0.0);
  CHECK(pohozaev::identity_coefficient(6, 2.0) == 0.0);
}

TEST_CASE("zero field gives zero terms", "[pohozaev]") {
  const tube::TubeGrid g(1, 0.2, 64, 9, kTwoPi);
  const auto geo = pohozaev::circle_geometry(g, 1.0);
  const auto rep = pohozaev::integrated_identity(geo, g.zeros(), 3.0);
  CHECK(rep.boundary_term == 0.0);
  CHECK(rep.bulk == std::array<double, 3>{0.0, 0.0, 0.0});
  CHECK(rep.identity_residual == 0.0);
  CHECK(tube::sup_norm(pohozaev::divergence_identity_residual(geo, g.zeros(), pohozaev::distance_phi(g), 3.0)) == 0.0);
  REQUIRE_KIND(pohozaev::poincare_check(geo, g.zeros()), ErrorKind::ZeroField);
}

TEST_CASE("fields with a boundary trace are refused", "[pohozaev]") {
  const tube::TubeGrid g(1, 0.2, 64, 9, kTwoPi);
  tube::TubeField u = g.zeros();
  u.col(0).setConstant(1e-3);
  REQUIRE_KIND(pohozaev::integrated_identity(pohozaev::circle_geometry(g, 1.0), u, 3.0), ErrorKind::NonzeroTrace);
}

TEST_CASE("geometry bounds of the planar circle in closed form", "[pohozaev]") {
  const double R = 1.0, eps = 0.2;
  const auto ft = fermi::frame_tensors(manifold::circle_curve(R, 2, 16));
  const auto b = pohozaev::measure_geometry(ft, eps);
  CHECK(b.laplacian_defect == Approx(1.0 / (R - eps)).epsilon(1e-8));
  CHECK(b.hessian_defect == Approx(1.0 / (R - eps)).epsilon(1e-8));
  CHECK(b.laplacian_gradient == Approx((1.0 / R) / ((1 - eps / R) * (1 - eps / R))).epsilon(1e-8));
  CHECK(b.volume_spread == Approx((1 + eps / R) / (1 - eps / R)).epsilon(1e-8));
  const auto flat = pohozaev::measure_geometry(fermi::frame_tensors(manifold::straight_curve(kTwoPi, 4, 16)), eps);
  CHECK(flat.laplacian_defect == 0.0);
  CHECK(flat.laplacian_gradient == 0.0);
  CHECK(flat.hessian_defect == 0.0);
  CHECK(flat.volume_spread == 1.0);
}

TEST_CASE("Dirichlet eigenvalue of the unit ball", "[pohozaev]") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(pohozaev::ball_dirichlet_eigenvalue(1) == Approx(pi2 / 4.0).epsilon(1e-14));
  CHECK(pohozaev::ball_dirichlet_eigenvalue(2) == Approx(5.783185962946784).epsilon(1e-12));
  CHECK(pohozaev::ball_dirichlet_eigenvalue(3) == Approx(pi2).epsilon(1e-12));
}

TEST_CASE("tube geometry checks its inputs", "[pohozaev]") {
  const tube::TubeGrid g(1, 0.2, 64, 9, kTwoPi);
  REQUIRE_KIND(pohozaev::TubeGeometry(g, fermi::frame_tensors(manifold::circle_curve(1.0, 2, 11))), ErrorKind::GridMismatch);
  const tube::TubeGrid disc(2, 0.2, 64, 9, kTwoPi);
  REQUIRE_KIND(pohozaev::circle_geometry(disc, 1.0), ErrorKind::UnsupportedGeometry);
  CHECK_NOTHROW(pohozaev::straight_geometry(disc));
}

TEST_CASE("affine phi on the straight tube", "[pohozaev]") {
  std::vector<double> errors;
  for (int nz : {64, 128}) {
    const auto prof = radial::solve_ground_state({1, 3.0, 1}, 1e-13, nz);
    const tube::TubeGrid g(1, 0.2, nz, 9, kTwoPi);
    const auto u = tube::ansatz(g, prof);
    tube::TubeField phi(g.nt(), g.nodes());
    for (int j = 0; j < g.nodes(); ++j) phi.col(j).setConstant(0.7 * g.z(j) + 0.1);
    const auto res = pohozaev::divergence_identity_residual(pohozaev::straight_geometry(g), u, phi, 3.0);
    errors.push_back(tube::sup_norm(interior_sup_mask(g, res)) / sup_gradient_sq(g, u) * g.eps());
  }
  CHECK(errors[0] < 1e-2);
  CHECK(errors[1] < 0.35 * errors[0]);
}

TEST_CASE("pointwise identity on a converged circle solution", "[pohozaev]") {
  const double eps = 0.1;
  const int nz = 128;
  const auto prof = radial::solve_ground_state({1, 3.0, 1}, 1e-13, nz);
  const tube::TubeGrid g(1, eps, nz, 2 * int(std::ceil(2.28 / eps)) + 3, kTwoPi);
  const tube::TubeOperator op = tube::circle_operator(g, 1.0);
  const auto sol = tube::picard_solve(op, tube::iterate_approximation(op, prof, 6), tube::ContractParameters{});
  const auto res = pohozaev::divergence_identity_residual(pohozaev::circle_geometry(g, 1.0), sol.u, pohozaev::distance_phi(g), 3.0);
  const double h = g.spacing();
  const double pde = sol.residual / tube::sup_norm(sol.u.array().pow(3.0).matrix());
  CHECK(tube::sup_norm(interior_sup_mask(g, res)) / sup_gradient_sq(g, sol.u) < 10.0 * (h * h + pde));
}

TEST_CASE("radial fiber identity on the straight tube", "[pohozaev]") {
  std::vector<double> rel;
  for (int nz : {64, 128}) {
    const auto prof = radial::solve_ground_state({2, 3.0, 1}, 1e-13, nz);
    const tube::TubeGrid g(2, 0.2, nz, 9, kTwoPi);
    const auto rep = pohozaev::integrated_identity(pohozaev::straight_geometry(g), tube::ansatz(g, prof), 3.0);
    rel.push_back(std::abs(rep.relative_residual()));
    CHECK(rep.bulk[2] == 0.0);
  }
  CHECK(rel[0] < 1e-2);
  CHECK(rel[1] < 0.5 * rel[0]);
}

TEST_CASE("Poincare ratio is invariant for fixed rescaled shapes on the straight tube", "[pohozaev]") {
  for (int n : {1, 2}) {
    std::vector<double> ratios;
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
      const tube::TubeGrid g(n, eps, 64, 9, kTwoPi);
      tube::TubeField u = g.zeros();
      for (int j = 0; j < g.nodes(); ++j)
        if (!g.is_boundary(j)) u.col(j).setConstant((1.0 - g.s(j) * g.s(j)) * (1.0 + 0.3 * g.s(j)));
      if (n == 2)
        for (int j = 0; j < g.nodes(); ++j)
          if (!g.is_boundary(j)) u.col(j).setConstant(std::cos(0.5 * std::numbers::pi * g.s(j)));
      ratios.push_back(pohozaev::poincare_check(pohozaev::straight_geometry(g), u));
    }
    for (double r : ratios) CHECK(r == Approx(ratios.front()).epsilon(1e-6));
    CHECK(ratios.front() <= 1.0 / pohozaev::ball_dirichlet_eigenvalue(n) * 1.01);
  }
}

TEST_CASE("Cauchy-Schwarz step on random fields", "[pohozaev]") {
  const tube::TubeGrid g(1, 0.2, 64, 9, kTwoPi);
  const auto geo = pohozaev::circle_geometry(g, 1.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 6; ++trial) {
    tube::TubeField u = g.zeros();
    for (int q = 1; q <= 3; ++q) {
      const double a = normal(rng), b = normal(rng);
      for (int i = 0; i < g.nt(); ++i)
        for (int j = 1; j < g.nodes() - 1; ++j)
          u(i, j) += (a + b * std::sin(g.t(i))) * std::sin(0.5 * std::numbers::pi * q * (g.s(j) + 1.0));
    }
    const auto rep = pohozaev::integrated_identity(geo, u, 3.0);
    CHECK(rep.cauchy_schwarz_lhs <= rep.cauchy_schwarz_rhs);
  }
}

TEST_CASE("nonexistence certificates", "[pohozaev]") {
  const auto curve = [](int n) { return fermi::frame_tensors(manifold::circle_curve(1.0, n + 1, 33)); };
  const auto cert = pohozaev::nonexistence_certificate({3, 7.0, 1}, 0.05, curve(3));
  CHECK(cert.coefficient == Approx(0.125));
  CHECK(std::isfinite(cert.eps_bar));
  CHECK(cert.eps_bar > 0.05);
  CHECK(cert.verdict == pohozaev::Verdict::NoPositiveSolution);
  const auto wide = pohozaev::nonexistence_certificate({3, 7.0, 1}, 1.2 * cert.eps_bar, curve(3));
  CHECK(wide.verdict == pohozaev::Verdict::Inconclusive);

  const auto critical = pohozaev::nonexistence_certificate({3, 5.0, 1}, 0.05, curve(3));
  CHECK(critical.verdict == pohozaev::Verdict::Inconclusive);
  CHECK(critical.eps_bar == 0.0);

  REQUIRE_KIND(pohozaev::nonexistence_certificate({2, 9.0, 1}, 0.05, curve(2)), ErrorKind::SubcriticalInput);
  REQUIRE_KIND(pohozaev::nonexistence_certificate({3, 3.0, 1}, 0.05, curve(3)), ErrorKind::SubcriticalInput);
  REQUIRE_KIND(pohozaev::nonexistence_certificate({4, 7.0, 1}, 0.05, curve(3)), ErrorKind::GridMismatch);

  // A flat tube has no geometric error terms.
  const auto flat = pohozaev::nonexistence_certificate({3, 7.0, 1}, 0.3, fermi::frame_tensors(manifold::straight_curve(kTwoPi, 4, 16)));
  CHECK(flat.c_geo == 0.0);
  CHECK(std::isinf(flat.eps_bar));
}

TEST_CASE("report layout", "[pohozaev]") {
  std::vector<pohozaev::ReportRow> rows(2);
  rows[0].eps = 0.1;
  rows[0].coefficient = -0.5;
  rows[1].eps = 0.05;
  rows[1].certificate = pohozaev::nonexistence_certificate({3, 7.0, 1}, 0.05, fermi::frame_tensors(manifold::circle_curve(1.0, 4, 33)));
  std::ostringstream out;
  pohozaev::write_report(out, rows);
  std::istringstream in(out.str());
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(header == "eps,boundary_term,bulk1,bulk2,bulk3,residual,coefficient,eps_bar,verdict");
  CHECK(first == "0.1,nan,nan,nan,nan,nan,-0.5,nan,SubcriticalInput");
  CHECK(second.substr(second.rfind(',') + 1) == "NoPositiveSolution");
}

#include "../common/radial_fixtures.hpp"
#include "support.hpp"
#include "tubesol/radial/ground_state.hpp"
#include "tubesol/radial/io.hpp"
#include "tubesol/radial/spectrum.hpp"

using namespace tubesol;
using Catch::Approx;

TEST_CASE("ground state is positive, decreasing and solves the discrete problem", "[radial]") {
  for (const auto& fx : test::kRadialFixtures) {
    const ProblemParams prm{fx.n, fx.p, 1};
    const auto prof = radial::solve_ground_state(prm, 1e-10, 512);
    INFO("n=" << fx.n << " p=" << fx.p);
    CHECK(prof.residual() < 1e-8);
    CHECK(prof.center_value() > 0.0);
    CHECK(prof.boundary_slope() < 0.0);
    const Eigen::VectorXd& u = prof.values();
    CHECK(u[u.size() - 1] == 0.0);
    for (Eigen::Index j = 0; j + 1 < u.size(); ++j) CHECK(u[j + 1] < u[j]);
    CHECK(prof.center_value() == Approx(fx.center).epsilon(1e-4));
  }
}

TEST_CASE("fine-grid profile and spectrum match the frozen oracle", "[radial][slow]") {
  const auto& fx = test::kRadialFixtures[0];
  const auto prof = radial::solve_ground_state({fx.n, fx.p, 1}, 1e-13, 4096);
  const auto modes = radial::linearized_spectrum(prof, 2, 4);
  CHECK(prof.center_value() == Approx(fx.center).epsilon(1e-6));
  CHECK(radial::ground_eigenvalue(modes) == Approx(fx.mu0).epsilon(1e-6));
  CHECK(radial::first_excited_eigenvalue(modes) == Approx(fx.mu1).epsilon(1e-6));
}

TEST_CASE("critical and supercritical exponents are rejected for n >= 3", "[radial]") {
  REQUIRE_KIND(radial::solve_ground_state({3, 5.0, 1}, 1e-10, 256), ErrorKind::SupercriticalExponent);
  REQUIRE_KIND(radial::solve_ground_state({4, 3.5, 1}, 1e-10, 256), ErrorKind::SupercriticalExponent);
}

TEST_CASE("evaluate_ubar scaling and boundary", "[radial]") {
  const auto prof = radial::solve_ground_state({1, 3.0, 1}, 1e-12, 256);
  CHECK(radial::evaluate_ubar(prof, 0.3, 0.3) == 0.0);
  const double r = prof.nodes()[17];
  CHECK(radial::evaluate_ubar(prof, 1.0, r) == Approx(prof.values()[17]).epsilon(1e-12));
  CHECK(radial::evaluate_ubar(prof, 0.1, 0.0) == Approx(prof.center_value() / 0.1).epsilon(1e-12));
  REQUIRE_KIND(radial::evaluate_ubar(prof, 0.1, 0.2), ErrorKind::OutOfTube);
}

TEST_CASE("linearized spectrum is nondegenerate with one negative eigenvalue", "[radial]") {
  for (const auto& fx : test::kRadialFixtures) {
    const auto prof = radial::solve_ground_state({fx.n, fx.p, 1}, 1e-12, 512);
    const auto modes = radial::linearized_spectrum(prof, 2, 4);
    const auto merged = radial::merged_spectrum(modes);
    INFO("n=" << fx.n);
    CHECK(merged[0].value < 0.0);
    CHECK(merged[1].value > 0.0);
    for (const auto& e : merged) CHECK(std::abs(e.value) > radial::kDegeneracyTolerance);
    CHECK(merged[0].value == Approx(fx.mu0).epsilon(1e-4));
    CHECK(merged[1].value == Approx(fx.mu1).epsilon(1e-4));
  }
}

TEST_CASE("ground eigenfunction of the n = 2 fiber is sign-definite", "[radial]") {
  const auto prof = radial::solve_ground_state({2, 3.0, 1}, 1e-12, 256);
  const auto modes = radial::linearized_spectrum(prof, 0, 1);
  const Eigen::VectorXd phi = modes[0].eigenfunctions.col(0);
  const double sign = phi[0] > 0.0 ? 1.0 : -1.0;
  for (Eigen::Index j = 0; j + 1 < phi.size(); ++j) CHECK(sign * phi[j] > 0.0);
}

TEST_CASE("angular multiplicities", "[radial]") {
  CHECK(radial::harmonic_multiplicity(1, 0) == 1);
  CHECK(radial::harmonic_multiplicity(1, 1) == 1);
  CHECK(radial::harmonic_multiplicity(2, 3) == 2);
  CHECK(radial::harmonic_multiplicity(3, 2) == 5);
}

TEST_CASE("profile table round trips through the reader", "[radial]") {
  const auto prof = radial::solve_ground_state({1, 3.0, 1}, 1e-12, 128);
  const auto table = radial::profile_table(prof);
  CHECK(table.header == std::vector<std::string>{"r", "U"});
  const Eigen::VectorXd back = radial::read_profile_values(table, prof.intervals());
  CHECK((back - prof.values()).cwiseAbs().maxCoeff() == 0.0);
}

#include <filesystem>

#include "support.hpp"
#include "tubesol/manifold/curve.hpp"
#include "tubesol/manifold/io.hpp"
#include "tubesol/manifold/spectrum.hpp"

using namespace tubesol;
using Catch::Approx;

TEST_CASE("closed-form model spectra", "[manifold]") {
  CHECK(manifold::model_spectrum(manifold::Circle{1.0}, 5).eigenvalues() == std::vector<double>{0, 1, 1, 4, 4});
  CHECK(manifold::model_spectrum(manifold::Sphere{2, 1.0}, 4).eigenvalues() == std::vector<double>{0, 2, 2, 2});
  const double two_pi = 2.0 * std::numbers::pi;
  const auto torus = manifold::model_spectrum(manifold::FlatTorus{{two_pi, two_pi}}, 5).eigenvalues();
  REQUIRE(torus.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(torus[i] == Approx(i == 0 ? 0.0 : 1.0).margin(1e-12));
}

TEST_CASE("flat torus levels match brute-force lattice enumeration", "[manifold]") {
  const std::vector<double> lengths{3.0, 5.0};
  const double cutoff = 40.0;
  std::vector<double> brute;
  for (int a = -40; a <= 40; ++a)
    for (int b = -40; b <= 40; ++b) {
      const double x = 2.0 * std::numbers::pi * a / lengths[0], y = 2.0 * std::numbers::pi * b / lengths[1];
      if (x * x + y * y < cutoff) brute.push_back(x * x + y * y);
    }
  std::sort(brute.begin(), brute.end());
  const auto spec = manifold::spectrum_below(manifold::FlatTorus{lengths}, cutoff);
  std::vector<double> listed;
  for (const auto& lv : spec.levels())
    if (lv.value < cutoff)
      for (int m = 0; m < lv.multiplicity; ++m) listed.push_back(lv.value);
  REQUIRE(listed.size() == brute.size());
  for (std::size_t i = 0; i < brute.size(); ++i) CHECK(listed[i] == Approx(brute[i]).margin(1e-10));
}

TEST_CASE("Weyl counts", "[manifold]") {
  const auto circle = manifold::spectrum_below(manifold::Circle{1.0}, 100.0);
  CHECK(manifold::weyl_count(circle, 0.0) == 1);
  // j ∈ {0, ±1, ±2}
  CHECK(manifold::weyl_count(circle, 4.5) == 5);
  for (double lambda : {0.5, 3.9, 17.2, 80.0})
    CHECK(manifold::weyl_count(circle, lambda) == 2 * long(std::floor(std::sqrt(lambda))) + 1);
  REQUIRE_KIND(manifold::weyl_count(circle, 1e4), ErrorKind::RangeExceeded);
  const auto sphere = manifold::spectrum_below(manifold::Sphere{2, 1.0}, 1.1e4);
  CHECK(manifold::weyl_exponent(sphere, 1e2, 1e4) == Approx(1.0).margin(0.05));
}

TEST_CASE("invalid families are rejected", "[manifold]") {
  REQUIRE_KIND(manifold::model_spectrum(manifold::Sphere{0, 1.0}, 3), ErrorKind::UnsupportedFamily);
  REQUIRE_KIND(manifold::model_spectrum(manifold::FlatTorus{{}}, 3), ErrorKind::UnsupportedFamily);
}

TEST_CASE("planar circle frame is the outward normal", "[manifold]") {
  const auto c = manifold::circle_curve(1.0, 2, 32);
  CHECK(c.holonomy_angle() == Approx(0.0).margin(1e-12));
  for (int j = 0; j < c.samples(); ++j) {
    const Eigen::VectorXd x = c.points().row(j).transpose();
    const Eigen::VectorXd e = c.normal(0).row(j).transpose();
    CHECK((e - x / x.norm()).norm() < 1e-10);
  }
  CHECK(c.length() == Approx(2.0 * std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("frame in R^3 is orthonormal and normal to the tangent", "[manifold]") {
  // Tilted ellipse in R^3.
  const int N = 64;
  Eigen::MatrixXd pts(N, 3);
  for (int j = 0; j < N; ++j) {
    const double t = 2.0 * std::numbers::pi * j / N;
    pts.row(j) << 2.0 * std::cos(t), std::sin(t), 0.3 * std::sin(t);
  }
  const auto c = manifold::build_frame(pts, 2.0 * std::numbers::pi, 3);
  REQUIRE(c.normal_dim() == 2);
  for (int j = 0; j < N; ++j) {
    const Eigen::VectorXd v = c.velocity().row(j).transpose();
    const Eigen::VectorXd e1 = c.normal(0).row(j).transpose(), e2 = c.normal(1).row(j).transpose();
    CHECK(std::abs(e1.norm() - 1.0) < 1e-10);
    CHECK(std::abs(e2.norm() - 1.0) < 1e-10);
    CHECK(std::abs(e1.dot(e2)) < 1e-10);
    CHECK(std::abs(e1.dot(v)) < 1e-10 * v.norm());
    CHECK(std::abs(e2.dot(v)) < 1e-10 * v.norm());
  }
  CHECK(std::isfinite(c.holonomy_angle()));
}

TEST_CASE("open arcs and degenerate samples are rejected", "[manifold]") {
  const int N = 32;
  Eigen::MatrixXd arc(N, 2);
  for (int j = 0; j < N; ++j) arc.row(j) << std::cos(0.5 * j / N), std::sin(0.5 * j / N);
  REQUIRE_KIND(manifold::build_frame(arc, 1.0, 2), ErrorKind::NonClosedCurve);
  const Eigen::MatrixXd point = Eigen::MatrixXd::Zero(N, 2);
  REQUIRE_KIND(manifold::build_frame(point, 1.0, 2), ErrorKind::DegenerateTangent);
}

TEST_CASE("curve CSV round trip", "[manifold]") {
  const auto c = manifold::circle_curve(1.5, 3, 24);
  const auto path = std::filesystem::temp_directory_path() / "tubesol_curve_roundtrip.csv";
  csv::write(path.string(), manifold::curve_table(c));
  const auto back = manifold::read_curve(path.string());
  std::filesystem::remove(path);
  CHECK(back.samples() == c.samples());
  CHECK(back.period() == Approx(c.period()).epsilon(1e-12));
  CHECK((back.points() - c.points()).cwiseAbs().maxCoeff() < 1e-14);
}

#include <Eigen/Dense>
#include <sstream>

#include "support.hpp"
#include "tubesol/core/csv.hpp"
#include "tubesol/core/fit.hpp"
#include "tubesol/core/params.hpp"
#include "tubesol/core/spectral.hpp"
#include "tubesol/core/tridiagonal.hpp"

using namespace tubesol;
using Catch::Approx;

TEST_CASE("tridiagonal eigenpairs match a dense solve", "[core]") {
  linalg::SymTridiagonal t;
  const int n = 40;
  t.d = Eigen::VectorXd::LinSpaced(n, -3.0, 5.0);
  t.e = Eigen::VectorXd::Constant(n - 1, 0.7);
  Eigen::MatrixXd dense = t.d.asDiagonal();
  for (int i = 0; i + 1 < n; ++i) dense(i, i + 1) = dense(i + 1, i) = t.e[i];
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(dense);
  const auto eig = linalg::lowest_eigenpairs(t, 0, 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(eig.values[k] == Approx(ref.eigenvalues()[k]).margin(1e-12));
    const Eigen::VectorXd r = t.apply(eig.vectors.col(k)) - eig.values[k] * eig.vectors.col(k);
    CHECK(r.norm() < 1e-10);
  }
  CHECK(linalg::count_below(t, 0.0) == (ref.eigenvalues().array() < 0.0).count());
}

TEST_CASE("tridiagonal LU solves and reports singularity", "[core]") {
  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(9, -1.0), upper = lower;
  const Eigen::VectorXd diag = Eigen::VectorXd::Constant(10, 2.0);
  const linalg::TridiagonalLU lu(lower, diag, upper);
  REQUIRE_FALSE(lu.singular());
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(10, 1.0, 2.0);
  Eigen::VectorXd b = 2.0 * x;
  for (int i = 0; i < 9; ++i) {
    b[i] -= x[i + 1];
    b[i + 1] -= x[i];
  }
  CHECK((lu.solve(b) - x).cwiseAbs().maxCoeff() < 1e-12);
  const linalg::TridiagonalLU bad(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1));
  CHECK(bad.singular());
}

TEST_CASE("spectral derivative is exact for trigonometric polynomials", "[core]") {
  const int n = 33;
  const double period = 5.0, w = 2.0 * std::numbers::pi / period;
  Eigen::VectorXd f(n), df(n), d2f(n);
  for (int i = 0; i < n; ++i) {
    const double t = period * i / n;
    f[i] = std::sin(3 * w * t) + 0.5 * std::cos(w * t);
    df[i] = 3 * w * std::cos(3 * w * t) - 0.5 * w * std::sin(w * t);
    d2f[i] = -9 * w * w * std::sin(3 * w * t) - 0.5 * w * w * std::cos(w * t);
  }
  CHECK((spectral::differentiate(f, period) - df).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((spectral::differentiate(f, period, 2) - d2f).cwiseAbs().maxCoeff() < 1e-9);
  const Eigen::VectorXd via_matrix = spectral::derivative_matrix(n, period) * f;
  CHECK((via_matrix - df).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("log-log fit recovers a power law", "[core]") {
  const auto x = fit::log_space(0.1, 10.0, 9);
  REQUIRE(x.front() == 0.1);
  REQUIRE(x.back() == 10.0);
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  const auto line = fit::log_log(x, y);
  CHECK(line.slope == Approx(-1.5).margin(1e-12));
  CHECK(std::exp(line.intercept) == Approx(3.0).epsilon(1e-12));
  REQUIRE_KIND(fit::log_log(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, -1.0}), ErrorKind::InvalidArgument);
}

TEST_CASE("csv round trip keeps comments and exact values", "[core]") {
  csv::Table t;
  t.comments = {"config_hash=abc"};
  t.header = {"a", "b"};
  t.rows = {{0.1, 1.0 / 3.0}, {-2.5e-17, 7.0}};
  std::stringstream io;
  csv::write(io, t);
  const auto back = csv::parse(io);
  CHECK(back.comments == t.comments);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("b") == 1);
}

TEST_CASE("critical exponent and subcriticality", "[core]") {
  ProblemParams prm{3, 5.0, 1};
  CHECK(prm.critical_exponent() == 5.0);
  CHECK_FALSE(prm.subcritical());
  prm.p = 4.9;
  CHECK(prm.subcritical());
  CHECK(ProblemParams{2, 50.0, 1}.subcritical());
  CHECK(ProblemParams{1, 3.0, 1}.amplitude_exponent() == -1.0);
}

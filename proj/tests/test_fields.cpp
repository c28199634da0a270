#include "chemo/field.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace chemo;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid::line(1.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(Grid::line(0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(Grid(3, {1.0, 1.0}, {8, 8}), std::invalid_argument);
  const Grid g = Grid::rect(2.0, 3.0, 9, 13);
  CHECK(g.size() == 9 * 13);
  CHECK(g.spacing(0) == Approx(0.25));
  CHECK(g.spacing(1) == Approx(0.25));
  CHECK(g.measure() == Approx(6.0));
  CHECK(g.weights().sum() == Approx(6.0).epsilon(1e-14));
}

TEST_CASE("field rejects non-finite values and wrong sizes") {
  const Grid g = Grid::line(1.0, 8);
  ArrayXd bad = ArrayXd::Ones(8);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(ScalarField(g, bad));
  CHECK_THROWS(ScalarField(g, ArrayXd::Ones(7)));
}

TEST_CASE("integrate") {
  CHECK(integrate(ScalarField::constant(Grid::line(2.0, 33), 3.0)) == Approx(6.0).epsilon(1e-15));
  CHECK(integrate(ScalarField::constant(Grid::line(1.0, 33), 0.0)) == 0.0);
  const Grid g = Grid::line(1.0, 256);
  CHECK(std::abs(integrate(ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); }))) <= 1e-3);
  // Exact for fields affine per cell: integral of x on [0, 3] is 4.5.
  CHECK(integrate(ScalarField::sample(Grid::line(3.0, 11), [](double x, double) { return x; })) ==
        Approx(4.5).epsilon(1e-15));
  // Bilinear in 2D: integral of x*y on [0,2]x[0,1] is 1.
  CHECK(integrate(ScalarField::sample(Grid::rect(2.0, 1.0, 9, 17), [](double x, double y) { return x * y; })) ==
        Approx(1.0).epsilon(1e-14));
}

TEST_CASE("norms and mean") {
  const Grid g = Grid::line(1.0, 64);
  CHECK(lp_norm(ScalarField::constant(g, 2.0), 2.0) == Approx(2.0).epsilon(1e-15));
  CHECK(lp_norm(ScalarField::constant(g, 2.0), 3.5) == Approx(2.0).epsilon(1e-14));
  ArrayXd spike = ArrayXd::Zero(64);
  spike[10] = -5.0;
  CHECK(linf_norm(ScalarField(g, spike)) == 5.0);
  CHECK_THROWS_AS(lp_norm(ScalarField(g, spike), 0.5), std::invalid_argument);
  const Grid g256 = Grid::line(1.0, 256);
  CHECK(std::abs(mean(ScalarField::sample(g256, [](double x, double) { return std::cos(pi * x); }))) <= 1e-3);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ArrayXd f = test::random_positive(64, rng, -1.0, 1.0);
    // Hoelder ordering on a unit-measure domain.
    double prev = lp_norm(g, f, 1.0);
    for (double p : {1.5, 2.0, 3.0, 6.0}) {
      const double now = lp_norm(g, f, p);
      CHECK(now >= prev * (1.0 - 1e-14));
      prev = now;
    }
    CHECK(prev <= linf_norm(f) * (1.0 + 1e-14));
    const ArrayXd centred = f - mean(g, f);
    CHECK(std::abs(mean(g, centred)) <= 1e-14 * linf_norm(f));
  }
}

TEST_CASE("discrete laplacian") {
  const Grid g1 = Grid::line(1.0, 32);
  const Grid g2 = Grid::rect(1.0, 2.0, 12, 20);
  for (const Grid& g : {g1, g2}) {
    CHECK(linf_norm(discrete_laplacian(ScalarField::constant(g, 4.2)).values()) == 0.0);
  }

  SUBCASE("cosine mode is an eigenvector") {
    const double L = 2.0;
    const Grid g = Grid::line(L, 41);
    const double h = g.spacing(0);
    const double lambda1 = (2.0 - 2.0 * std::cos(pi * h / L)) / (h * h);
    const ScalarField f = ScalarField::sample(g, [&](double x, double) { return std::cos(pi * x / L); });
    const ArrayXd lap = discrete_laplacian(f).values();
    CHECK(linf_norm(lap + lambda1 * f.values()) <= 1e-11 * lambda1);
  }

  SUBCASE("telescoping, linearity and agreement with the assembled matrix") {
    std::mt19937_64 rng(11);
    for (const Grid& g : {g1, g2}) {
      const Eigen::MatrixXd L = test::laplacian_matrix(g);
      for (int trial = 0; trial < 10; ++trial) {
        const ArrayXd f = test::random_positive(g.size(), rng, -1.0, 1.0);
        const ArrayXd q = test::random_positive(g.size(), rng, -1.0, 1.0);
        const ArrayXd lf = discrete_laplacian(g, f);
        CHECK(std::abs(integrate(g, lf)) <= 1e-12 * linf_norm(f) * g.size());
        const ArrayXd combo = discrete_laplacian(g, (2.5 * f - 0.75 * q).eval());
        CHECK(linf_norm(combo - (2.5 * lf - 0.75 * discrete_laplacian(g, q))) <= 1e-12 * linf_norm(lf));
        const Eigen::VectorXd ref = L * f.matrix();
        CHECK(linf_norm(lf - ref.array()) <= 1e-12 * linf_norm(lf));
      }
    }
  }
}

TEST_CASE("gradient squared integral") {
  CHECK(gradient_sq_integral(ScalarField::constant(Grid::rect(1.0, 1.0, 9, 9), 3.0)) == 0.0);
  for (Index n : {8, 33, 200}) {
    const Grid g = Grid::line(1.0, n);
    CHECK(gradient_sq_integral(ScalarField::sample(g, [](double x, double) { return x; })) ==
          Approx(1.0).epsilon(1e-13));
  }
  const double L = 3.0;
  const Grid g = Grid::line(L, 256);
  const double got = gradient_sq_integral(ScalarField::sample(g, [&](double x, double) { return std::cos(pi * x / L); }));
  CHECK(std::abs(got - pi * pi / (2.0 * L)) <= 1e-3);

  // Summation by parts against the Laplacian, 2D included.
  std::mt19937_64 rng(3);
  const Grid g2 = Grid::rect(1.5, 1.0, 10, 14);
  const ArrayXd f = test::random_positive(g2.size(), rng, -1.0, 1.0);
  CHECK(gradient_sq_integral(g2, f) == Approx(-integrate(g2, (f * discrete_laplacian(g2, f)).eval())).epsilon(1e-12));
  // y-only field in 2D: integral of |d/dy y|^2 over [0,1.5]x[0,1] is 1.5.
  CHECK(gradient_sq_integral(ScalarField::sample(g2, [](double, double y) { return y; })) ==
        Approx(1.5).epsilon(1e-13));
}

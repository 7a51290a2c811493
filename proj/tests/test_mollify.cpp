#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "deed/errors.hpp"
#include "deed/mollify.hpp"
#include "support.hpp"

using namespace deed;

TEST_CASE("kernel shape") {
  for (double sigma : {0.3, 1.0, 1.5, 2.7}) {
    const GaussianKernel k = gaussian_kernel(sigma);
    CHECK(k.radius == static_cast<int>(std::ceil(3.0 * sigma)));
    double sum = 0.0;
    for (double w : k.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (int dj = -k.radius; dj <= k.radius; ++dj)
      for (int di = -k.radius; di <= k.radius; ++di) {
        CHECK(k.weight(di, dj) == k.weight(-di, dj));
        CHECK(k.weight(di, dj) == k.weight(di, -dj));
        if (di != 0 || dj != 0) CHECK(k.weight(di, dj) < k.weight(0, 0));
      }
  }
}

TEST_CASE("center to neighbour ratio is e^(1/2) at sigma = 1") {
  const GaussianKernel k = gaussian_kernel(1.0, 1.0);
  CHECK(k.weight(0, 0) / k.weight(1, 0) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  CHECK(k.weight(0, 0) / k.weight(0, 1) == doctest::Approx(1.64872127).epsilon(1e-8));
}

TEST_CASE("radius is measured in physical units") {
  CHECK(gaussian_kernel(1.0, 0.5).radius == 6);
  CHECK(gaussian_kernel(1.0, 2.0).radius == 2);
}

TEST_CASE("kernel rejects non-positive sigma") {
  CHECK_THROWS_AS(gaussian_kernel(0.0), ConfigError);
  CHECK_THROWS_AS(gaussian_kernel(-1.0), ConfigError);
  CHECK_THROWS_AS(mollify(ScalarField(Grid(3, 3)), 0.0), ConfigError);
}

TEST_CASE("constants are reproduced exactly") {
  for (double c : {0.0, 0.1, 1.0 / 3.0, -7.25}) {
    const ScalarField u(Grid(9, 5), c);
    for (double sigma : {0.5, 1.5, 4.0}) CHECK(mollify(u, sigma) == u);
  }
}

TEST_CASE("impulse reads off the truncated Gaussian") {
  const Grid g(21, 21);
  ScalarField u(g);
  u(10, 10) = 1.0;
  const ScalarField m = mollify(u, 1.0);
  double total = 0.0;
  for (int b = -3; b <= 3; ++b)
    for (int a = -3; a <= 3; ++a) total += std::exp(-(a * a + b * b) / 2.0);
  for (int dj = -3; dj <= 3; ++dj)
    for (int di = -3; di <= 3; ++di)
      CHECK(m(10 + di, 10 + dj) == doctest::Approx(std::exp(-(di * di + dj * dj) / 2.0) / total).epsilon(1e-12));
  CHECK(m(10 + 4, 10) == 0.0);
}

TEST_CASE("boundary weights renormalize") {
  // Impulse in the corner: the corner output is w(0,0) over the in-domain mass.
  const Grid g(10, 10);
  ScalarField u(g);
  u(0, 0) = 1.0;
  const ScalarField m = mollify(u, 1.0);
  double in_domain = 0.0;
  for (int b = 0; b <= 3; ++b)
    for (int a = 0; a <= 3; ++a) in_domain += std::exp(-(a * a + b * b) / 2.0);
  CHECK(m(0, 0) == doctest::Approx(1.0 / in_domain).epsilon(1e-12));
}

TEST_CASE("mollify is a convex average") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField u = test::random_field(Grid(12, 9), rng, -2, 3);
    const ScalarField m = mollify(u, 1.3);
    const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
    const auto [mlo, mhi] = std::minmax_element(m.values().begin(), m.values().end());
    CHECK(*mlo >= *lo);
    CHECK(*mhi <= *hi);
    CHECK(*mhi - *mlo <= *hi - *lo);
  }
}

TEST_CASE("mollify is linear") {
  std::mt19937_64 rng(6);
  const Grid g(11, 8, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField u = test::random_field(g, rng, -1, 1);
    const ScalarField v = test::random_field(g, rng, -1, 1);
    const double a = 0.7, b = -1.9;
    const ScalarField lhs = mollify(a * u + b * v, 1.2);
    const ScalarField rhs = a * mollify(u, 1.2) + b * mollify(v, 1.2);
    CHECK(sup_distance(lhs, rhs) <= 1e-12 * std::max(1.0, sup_norm(rhs)));
  }
}

TEST_CASE("mollify is non-expansive in L2") {
  std::mt19937_64 rng(7);
  const Grid g(13, 10);
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarField u = test::random_field(g, rng);
    const ScalarField du = 1e-3 * test::random_field(g, rng, -1, 1);
    CHECK(norm_l2(mollify(u + du, 0.8) - mollify(u, 0.8)) <= norm_l2(du) * (1.0 + 1e-12));
  }
}

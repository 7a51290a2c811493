#include <doctest.h>

#include <cmath>
#include <random>

#include "deed/errors.hpp"
#include "deed/inpaint_op.hpp"
#include "deed/mollify.hpp"
#include "deed/tensor_bank.hpp"
#include "support.hpp"

using namespace deed;

namespace {

bool is_identity(const TensorField& d, double tol = 0.0) {
  for (const SymTensor2 a : d.values()) {
    if (std::abs(a.a11 - 1.0) > tol || std::abs(a.a12) > tol || std::abs(a.a22 - 1.0) > tol) return false;
  }
  return true;
}

// u'(W-1-j, i) = u(i, j): the image turned by +90 degrees, x' = -y, y' = x.
ScalarField rotate90(const ScalarField& u) {
  const Grid& g = u.grid();
  ScalarField r(Grid(g.height(), g.width(), g.spacing()));
  for (int j = 0; j < g.height(); ++j)
    for (int i = 0; i < g.width(); ++i) r(g.height() - 1 - j, i) = u(i, j);
  return r;
}

}  // namespace

TEST_CASE("eed matrix at g = (3, 4)") {
  const SymTensor2 d = eed_matrix({3.0, 4.0}, 1.0);
  const double small = 1.0 / std::sqrt(26.0);
  CHECK(d.max_eigenvalue() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.min_eigenvalue() == doctest::Approx(small).epsilon(1e-12));
  CHECK(small == doctest::Approx(0.196116).epsilon(1e-6));
  const Vec2 along = d.apply({0.6, 0.8});
  CHECK(along.x == doctest::Approx(small * 0.6).epsilon(1e-12));
  CHECK(along.y == doctest::Approx(small * 0.8).epsilon(1e-12));
  const Vec2 tangent = d.apply({-0.8, 0.6});
  CHECK(tangent.x == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(tangent.y == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("eed matrix degenerate cases") {
  CHECK(eed_matrix({0.0, 0.0}, 3.0) == SymTensor2::identity());
  CHECK(eed_matrix({0.0, 0.0}, -2.0) == SymTensor2::identity());
  const SymTensor2 d = eed_matrix({1.5, -0.2}, 0.0);
  CHECK(d.a11 == doctest::Approx(1.0));
  CHECK(d.a12 == doctest::Approx(0.0));
  CHECK(d.a22 == doctest::Approx(1.0));
  // mu < 0 enlarges diffusion across the edge
  CHECK(eed_matrix({3.0, 4.0}, -1.0).max_eigenvalue() == doctest::Approx(std::sqrt(26.0)).epsilon(1e-12));
}

TEST_CASE("eed tensor of a constant image is the identity") {
  TensorParams p;
  for (double mu : {-2.0, 0.0, 1.0, 3.0}) {
    p.mu = mu;
    CHECK(is_identity(eed_tensor(ScalarField(Grid(6, 5), 0.4), p)));
  }
}

TEST_CASE("mu = 0 gives the identity for any image") {
  std::mt19937_64 rng(1);
  TensorParams p;
  p.mu = 0.0;
  CHECK(is_identity(eed_tensor(test::random_field(Grid(8, 7), rng), p), 1e-15));
}

TEST_CASE("eed tensor eigenvalues follow the mollified gradient") {
  std::mt19937_64 rng(2);
  TensorParams p;
  p.sigma = 0.8;
  for (double mu : {-2.0, 1.0, 3.0}) {
    p.mu = mu;
    const ScalarField u = test::random_field(Grid(9, 8), rng, 0, 4);
    const TensorField d = eed_tensor(u, p);
    const VectorField g = gradient_central(mollify(u, p.sigma));
    for (std::size_t k = 0; k < d.size(); ++k) {
      const double across = std::pow(1.0 + g[k].norm_squared(), -0.5 * mu);
      CHECK(d[k].min_eigenvalue() == doctest::Approx(std::min(1.0, across)).epsilon(1e-12));
      CHECK(d[k].max_eigenvalue() == doctest::Approx(std::max(1.0, across)).epsilon(1e-12));
      const double n = g[k].norm();
      if (n > 0.0) {
        const Vec2 t{-g[k].y / n, g[k].x / n};
        const Vec2 dt = d[k].apply(t);
        CHECK(dt.x == doctest::Approx(t.x).epsilon(1e-12));
        CHECK(dt.y == doctest::Approx(t.y).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("eed tensor commutes with a quarter turn") {
  std::mt19937_64 rng(3);
  TensorParams p;
  p.sigma = 1.2;
  p.mu = 1.5;
  const ScalarField u = test::random_field(Grid(9, 6), rng);
  const TensorField d = eed_tensor(u, p);
  const TensorField dr = eed_tensor(rotate90(u), p);
  const int h = u.grid().height();
  for (int j = 0; j < u.grid().height(); ++j)
    for (int i = 0; i < u.grid().width(); ++i) {
      // R D R^T with R = [[0, -1], [1, 0]]
      const SymTensor2 a = d(i, j);
      const SymTensor2 b = dr(h - 1 - j, i);
      CHECK(std::abs(b.a11 - a.a22) <= 1e-12);
      CHECK(std::abs(b.a12 + a.a12) <= 1e-12);
      CHECK(std::abs(b.a22 - a.a11) <= 1e-12);
    }
}

TEST_CASE("gradient weight") {
  CHECK(gradient_weight(4.0, 3.0, 1e-6) == doctest::Approx(8.000003).epsilon(1e-9));
  CHECK(gradient_weight(4.0, 3.0, 1e-6) == doctest::Approx(std::pow(4.000001, 1.5)).epsilon(1e-15));
  CHECK(gradient_weight(1.0, 2.0, 0.0) == 1.0);
}

TEST_CASE("weighted tensor of a constant image is the scaled identity") {
  TensorParams p;
  p.p_weight = 3.0;
  p.eps_weight = 1e-4;
  const TensorField d = weighted_eed_tensor(ScalarField(Grid(5, 5), 0.3), p);
  const double scale = std::pow(1e-4, 1.5);
  for (const SymTensor2 a : d.values()) {
    CHECK(a.a11 == doctest::Approx(scale).epsilon(1e-12));
    CHECK(a.a12 == 0.0);
    CHECK(a.a22 == doctest::Approx(scale).epsilon(1e-12));
  }
}

TEST_CASE("weighted tensor is eed scaled by the second-scale gradient") {
  std::mt19937_64 rng(4);
  TensorParams p;
  p.sigma = 1.0;
  p.delta = 2.0;
  p.p_weight = 2.5;
  const ScalarField u = test::random_field(Grid(8, 8), rng);
  const TensorField d1 = eed_tensor(u, p);
  const TensorField d2 = weighted_eed_tensor(u, p);
  const VectorField g = gradient_central(mollify(u, 2.0));
  for (std::size_t k = 0; k < d1.size(); ++k) {
    const double w = std::pow(p.eps_weight + g[k].norm_squared(), 1.25);
    CHECK(d2[k].a11 == doctest::Approx(w * d1[k].a11).epsilon(1e-12));
    CHECK(d2[k].a12 == doctest::Approx(w * d1[k].a12).epsilon(1e-12));
  }
}

TEST_CASE("weighted tensor respects its analytic eigenvalue floor") {
  std::mt19937_64 rng(5);
  for (double mu : {-2.0, 0.0, 1.0, 3.0})
    for (double pw : {1.5, 3.0, 4.0}) {
      TensorParams p;
      p.mu = mu;
      p.p_weight = pw;
      const ScalarField u = test::random_field(Grid(10, 9), rng);
      const VectorField g = gradient_central(mollify(u, p.sigma));
      double gmax = 0.0;
      for (const Vec2 q : g.values()) gmax = std::max(gmax, q.norm_squared());
      const double floor = std::pow(p.eps_weight, pw / 2) * std::pow(1.0 + gmax, -std::abs(mu) / 2);
      CHECK(weighted_eed_tensor(u, p).min_eigenvalue() >= floor * (1.0 - 1e-12));
    }
}

TEST_CASE("sine basis is orthonormal") {
  const Grid g(7, 5, 0.5);
  const GalerkinBasis b = sine_basis(g, 3, nullptr);
  REQUIRE(b.functions.size() == 9);
  for (std::size_t a = 0; a < b.functions.size(); ++a)
    for (std::size_t c = 0; c < b.functions.size(); ++c)
      CHECK(inner_product_l2(b.functions[a], b.functions[c]) == doctest::Approx(a == c ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("galerkin coefficients and tensor") {
  std::mt19937_64 rng(6);
  const Grid g(8, 6);
  TensorParams p;
  const TensorConstructor eed = [p](const ScalarField& v) { return eed_tensor(v, p); };

  SUBCASE("u = 2 v1 + w with w orthogonal to v1") {
    const GalerkinBasis b = sine_basis(g, 1, eed);
    const ScalarField& v1 = b.functions[0];
    CHECK(norm_l2(v1) == doctest::Approx(1.0).epsilon(1e-14));
    ScalarField w = test::random_field(g, rng, -1, 1);
    w = w - inner_product_l2(w, v1) * v1;
    const std::vector<double> c = galerkin_coefficients(2.0 * v1 + w, b);
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("u = v1 gives the generator at v1") {
    const GalerkinBasis b = sine_basis(g, 1, eed);
    const TensorField d = galerkin_tensor(b.functions[0], b);
    CHECK(tensor_sup_deviation(d, eed(b.functions[0])) <= 1e-14);
  }
  SUBCASE("u orthogonal to the basis gives the identity") {
    const GalerkinBasis b = sine_basis(g, 3, eed);
    ScalarField u = test::random_field(g, rng, -1, 1);
    for (const auto& v : b.functions) u = u - inner_product_l2(u, v) * v;
    CHECK(sup_norm(galerkin_projection(u, b)) <= 1e-14);
    CHECK(is_identity(galerkin_tensor(u, b), 1e-14));
    CHECK(is_identity(galerkin_tensor(ScalarField(g), b)));
  }
  SUBCASE("grid mismatch") {
    const GalerkinBasis b = sine_basis(g, 2, eed);
    CHECK_THROWS_AS(galerkin_coefficients(ScalarField(Grid(5, 5)), b), GridMismatch);
  }
}

TEST_CASE("tikhonov tensor") {
  const CoefficientMap coeff = eed_coefficient_map(1.0);
  SUBCASE("zero input gives the identity") {
    CHECK(is_identity(tikhonov_tensor(ScalarField(Grid(6, 6)), 1.0, coeff)));
  }
  SUBCASE("3x3 impulse") {
    // One free pixel c: energy 4 c^2 + (c - 1)^2, minimized at c = 1/5.
    const Grid g(3, 3);
    ScalarField u(g);
    u(1, 1) = 1.0;
    SolverSettings st;
    st.tol_inner = 1e-13;
    const SolveReport r = solve_I(u, 2.0, 1.0, mask_full(g), st);
    REQUIRE(r.converged);
    CHECK(r.solution(1, 1) == doctest::Approx(0.2).epsilon(1e-12));
    ScalarField expected(g);
    expected(1, 1) = 0.2;
    CHECK(sup_distance(r.solution, expected) <= 1e-12);
    const TensorField d = tikhonov_tensor(u, 1.0, coeff, st);
    CHECK(tensor_sup_deviation(d, apply_coefficient_map(expected, coeff)) <= 1e-11);
    // With reflection every central difference of this field is zero.
    CHECK(is_identity(d));
  }
}

TEST_CASE("inpaint tensor") {
  std::mt19937_64 rng(7);
  const Grid g(7, 6);
  const CoefficientMap coeff = eed_coefficient_map(1.0);
  SUBCASE("exponent gate") {
    const ScalarField u = test::random_field(g, rng);
    CHECK_THROWS_AS(inpaint_tensor(u, mask_full(g), 2.0, 2.0, 1.0, coeff), ExponentConstraintError);
    CHECK_THROWS_AS(inpaint_tensor(u, mask_full(g), 1.0, 3.0, 1.0, coeff), ExponentConstraintError);
    CHECK_NOTHROW(inpaint_tensor(u, mask_full(g), 2.0, 3.0, 1.0, coeff));
    CHECK_NOTHROW(inpaint_tensor(u, mask_full(g), 2.0, 2.001, 1.0, coeff));
  }
  SUBCASE("zero input gives the identity") {
    CHECK(is_identity(inpaint_tensor(ScalarField(g), test::random_mask(g, rng), 1.5, 2.0, 1.0, coeff)));
  }
  SUBCASE("full mask and s = 2 coincide with tikhonov") {
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField u = test::random_field(g, rng);
      CHECK(inpaint_tensor(u, mask_full(g), 2.0, 3.0, 0.7, coeff) == tikhonov_tensor(u, 0.7, coeff));
    }
  }
}

TEST_CASE("coefficient maps must be SPD") {
  const ScalarField v(Grid(4, 4), 0.5);
  const CoefficientMap bad = [](Point, double, Vec2) { return SymTensor2{1.0, 2.0, 1.0}; };
  CHECK_THROWS_AS(apply_coefficient_map(v, bad), InvariantViolation);
  const CoefficientMap located = [](Point x, double value, Vec2) {
    return SymTensor2{1.0 + x.x, 0.0, 1.0 + value};
  };
  const TensorField d = apply_coefficient_map(ScalarField(Grid(4, 4, 0.5), 0.5), located);
  CHECK(d(3, 0).a11 == 2.5);
  CHECK(d(3, 0).a22 == 1.5);
}

TEST_CASE("every constructor yields SPD tensors on random inputs") {
  std::mt19937_64 rng(8);
  const Grid g(9, 8);
  for (double mu : {-2.0, 0.0, 1.0, 3.0})
    for (double pw : {1.5, 3.0, 4.0})
      for (TensorKind kind : {TensorKind::Eed, TensorKind::Weighted, TensorKind::Galerkin, TensorKind::Tikhonov,
                              TensorKind::Inpaint}) {
        ModelParams params;
        params.t = 3.0;
        params.s = 1.8;
        params.tensor.mu = mu;
        params.tensor.p_weight = pw;
        const Mask mask = test::random_mask(g, rng);
        const TensorConstructor make = make_tensor_constructor(kind, params, mask);
        const TensorField d = make(test::random_field(g, rng, -3, 3));
        CHECK(d.positive_definite());
        CHECK(d.min_eigenvalue() > 0.0);
      }
}

TEST_CASE("tensor entries stay bounded over a data ball") {
  // For mu >= 0 every eigenvalue of the eed tensor lies in (0, 1].
  std::mt19937_64 rng(9);
  const Grid g(10, 10);
  TensorParams p;
  for (double radius : {0.5, 5.0, 50.0}) {
    double entry = 0.0;
    for (int n = 0; n < 20; ++n) {
      ScalarField u = test::random_field(g, rng, -1, 1);
      u = (radius / norm_lt(u, mask_full(g), 2.0)) * u;
      for (const SymTensor2 a : eed_tensor(u, p).values())
        entry = std::max({entry, std::abs(a.a11), std::abs(a.a12), std::abs(a.a22)});
    }
    CHECK(entry <= 1.0 + 1e-15);
  }
}

TEST_CASE("make_tensor_constructor validates") {
  ModelParams params;
  params.t = 2.0;
  params.s = 2.0;
  const Mask m = mask_full(Grid(4, 4));
  CHECK_THROWS_AS(make_tensor_constructor(TensorKind::Inpaint, params, m), ExponentConstraintError);
  CHECK_NOTHROW(make_tensor_constructor(TensorKind::Tikhonov, params, m));
  params.tensor.p_weight = 1.0;
  CHECK_THROWS_AS(make_tensor_constructor(TensorKind::Weighted, params, m), ConfigError);
}

TEST_CASE("tensor kind names") {
  for (TensorKind k : {TensorKind::Eed, TensorKind::Weighted, TensorKind::Galerkin, TensorKind::Tikhonov,
                       TensorKind::Inpaint})
    CHECK(parse_tensor_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_tensor_kind("structure"), ConfigError);
}

TEST_CASE("tensor continuity probe") {
  std::mt19937_64 rng(10);
  ModelParams params;
  const Grid g(12, 12);
  const TensorConstructor make = make_tensor_constructor(TensorKind::Eed, params, mask_full(g));
  SUBCASE("zero step") {
    const TensorContinuityReport r = tensor_continuity_probe(make, test::random_field(g, rng), 4, 0.0);
    CHECK(r.max_deviation == 0.0);
    CHECK(r.ratio == 0.0);
  }
  SUBCASE("deviation vanishes with the step at a constant image") {
    const ScalarField u(g, 0.5);
    double previous = INFINITY;
    for (double step : {1e-1, 5e-2, 2.5e-2, 1.25e-2}) {
      const TensorContinuityReport r = tensor_continuity_probe(make, u, 6, step, 1);
      CHECK(r.max_deviation < previous);
      previous = r.max_deviation;
    }
    CHECK(previous < 1e-5);
  }
  SUBCASE("empirical Lipschitz ratio is stable on a random image") {
    const ScalarField u = test::random_field(g, rng);
    const double r1 = tensor_continuity_probe(make, u, 6, 1e-4, 2).ratio;
    const double r2 = tensor_continuity_probe(make, u, 6, 5e-5, 2).ratio;
    CHECK(r1 > 0.0);
    CHECK(r2 == doctest::Approx(r1).epsilon(0.05));
  }
}

#include "deed/tensor_bank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "deed/errors.hpp"
#include "deed/inpaint_op.hpp"
#include "deed/mollify.hpp"

namespace deed {

SymTensor2 eed_matrix(Vec2 g, double mu) {
  const double g2 = g.norm_squared();
  if (g2 == 0.0) return SymTensor2::identity();
  const double across = std::pow(1.0 + g2, -0.5 * mu);
  // D = I + (across - 1) n n^T with n = g / |g|.
  const double c = (across - 1.0) / g2;
  return {1.0 + c * g.x * g.x, c * g.x * g.y, 1.0 + c * g.y * g.y};
}

TensorField eed_tensor(const ScalarField& u, const TensorParams& params) {
  params.validate();
  const VectorField g = gradient_central(mollify(u, params.sigma));
  TensorField out(u.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = eed_matrix(g[k], params.mu);
  return out;
}

double gradient_weight(double grad_norm_squared, double p, double eps) {
  return std::pow(eps + grad_norm_squared, 0.5 * p);
}

TensorField weighted_eed_tensor(const ScalarField& u, const TensorParams& params) {
  TensorField out = eed_tensor(u, params);
  const VectorField g = gradient_central(mollify(u, params.delta));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = gradient_weight(g[k].norm_squared(), params.p_weight, params.eps_weight) * out[k];
  }
  return out;
}

// ---------------------------------------------------------------- Galerkin

GalerkinBasis sine_basis(const Grid& grid, int modes, TensorConstructor generator) {
  if (modes < 1) throw ConfigError("sine_basis: need at least one mode");
  GalerkinBasis basis{{}, std::move(generator)};
  const double pi = std::numbers::pi;
  for (int n = 1; n <= modes; ++n) {
    for (int m = 1; m <= modes; ++m) {
      ScalarField v(grid);
      for (int j = 0; j < grid.height(); ++j) {
        for (int i = 0; i < grid.width(); ++i) {
          v(i, j) = std::sin(pi * m * (i + 1) / (grid.width() + 1)) *
                    std::sin(pi * n * (j + 1) / (grid.height() + 1));
        }
      }
      const double norm = norm_l2(v);
      if (norm > 0.0) basis.functions.push_back((1.0 / norm) * v);
    }
  }
  return basis;
}

std::vector<double> galerkin_coefficients(const ScalarField& u, const GalerkinBasis& basis) {
  if (basis.functions.empty()) throw ConfigError("GalerkinBasis: no basis functions");
  std::vector<double> c;
  c.reserve(basis.functions.size());
  for (const auto& v : basis.functions) c.push_back(inner_product_l2(u, v));
  return c;
}

ScalarField galerkin_projection(const ScalarField& u, const GalerkinBasis& basis) {
  const std::vector<double> c = galerkin_coefficients(u, basis);
  ScalarField out(u.grid());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const ScalarField& v = basis.functions[k];
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += c[k] * v[x];
  }
  return out;
}

TensorField galerkin_tensor(const ScalarField& u, const GalerkinBasis& basis) {
  if (!basis.generator) throw ConfigError("GalerkinBasis: no generator");
  TensorField out = basis.generator(galerkin_projection(u, basis));
  require_same_grid(out.grid(), u.grid(), "galerkin_tensor");
  out.check_positive_definite("galerkin generator");
  return out;
}

// ---------------------------------------------------------------- preconditioned tensors

CoefficientMap eed_coefficient_map(double mu) {
  return [mu](Point, double, Vec2 gradient) { return eed_matrix(gradient, mu); };
}

TensorField apply_coefficient_map(const ScalarField& v, const CoefficientMap& coeff) {
  const Grid& grid = v.grid();
  const VectorField g = gradient_central(v);
  TensorField out(grid);
  for (int j = 0; j < grid.height(); ++j) {
    for (int i = 0; i < grid.width(); ++i) {
      const Point x{i * grid.spacing(), j * grid.spacing()};
      out(i, j) = coeff(x, v(i, j), g(i, j));
    }
  }
  out.check_positive_definite("coefficient map");
  return out;
}

namespace {

ScalarField preconditioned(const ScalarField& u, double s, double lambda_pre, const Mask& mask,
                           const SolverSettings& settings) {
  SolveReport r = solve_I(u, s, lambda_pre, mask, settings);
  if (!r.converged) throw NonConvergenceError("preconditioner solve failed: " + r.diagnostics);
  return std::move(r.solution);
}

}  // namespace

TensorField tikhonov_tensor(const ScalarField& u, double lambda_pre, const CoefficientMap& coeff,
                            const SolverSettings& settings) {
  return apply_coefficient_map(preconditioned(u, 2.0, lambda_pre, mask_full(u.grid()), settings), coeff);
}

TensorField inpaint_tensor(const ScalarField& u, const Mask& mask, double s, double t, double lambda_pre,
                           const CoefficientMap& coeff, const SolverSettings& settings) {
  check_inpaint_exponents(s, t);
  require_same_grid(u.grid(), mask.grid(), "inpaint_tensor");
  return apply_coefficient_map(preconditioned(u, s, lambda_pre, mask, settings), coeff);
}

TensorConstructor make_tensor_constructor(TensorKind kind, const ModelParams& params, const Mask& mask) {
  params.validate(kind);
  const TensorParams tp = params.tensor;
  switch (kind) {
    case TensorKind::Eed:
      return [tp](const ScalarField& u) { return eed_tensor(u, tp); };
    case TensorKind::Weighted:
      return [tp](const ScalarField& u) { return weighted_eed_tensor(u, tp); };
    case TensorKind::Galerkin: {
      GalerkinBasis basis = sine_basis(mask.grid(), params.galerkin_modes,
                                       [tp](const ScalarField& v) { return eed_tensor(v, tp); });
      return [basis = std::move(basis)](const ScalarField& u) { return galerkin_tensor(u, basis); };
    }
    case TensorKind::Tikhonov:
      return [lp = params.lambda_pre, coeff = eed_coefficient_map(tp.mu), st = params.solver](
                 const ScalarField& u) { return tikhonov_tensor(u, lp, coeff, st); };
    case TensorKind::Inpaint:
      return [mask, s = params.s, t = params.t, lp = params.lambda_pre,
              coeff = eed_coefficient_map(tp.mu),
              st = params.solver](const ScalarField& u) { return inpaint_tensor(u, mask, s, t, lp, coeff, st); };
  }
  throw ConfigError("make_tensor_constructor: unknown tensor kind");
}

// ---------------------------------------------------------------- probes

double tensor_sup_deviation(const TensorField& a, const TensorField& b) {
  require_same_grid(a.grid(), b.grid(), "tensor_sup_deviation");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max({m, std::abs(a[k].a11 - b[k].a11), std::abs(a[k].a12 - b[k].a12),
                  std::abs(a[k].a22 - b[k].a22)});
  }
  return m;
}

TensorContinuityReport tensor_continuity_probe(const TensorConstructor& make, const ScalarField& u,
                                               int n_trials, double step, std::uint64_t seed) {
  if (n_trials < 1) throw ConfigError("tensor_continuity_probe: need at least one trial");
  if (!(step >= 0.0)) throw ConfigError("tensor_continuity_probe: step must be non-negative");
  TensorContinuityReport report{n_trials, step, 0.0, 0.0};
  const TensorField base = make(u);
  if (step == 0.0) return report;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int trial = 0; trial < n_trials; ++trial) {
    ScalarField d(u.grid());
    for (auto& v : d.values()) v = uniform(rng);
    const ScalarField perturbed = u + (step / norm_w12(d)) * d;
    report.max_deviation = std::max(report.max_deviation, tensor_sup_deviation(make(perturbed), base));
  }
  report.ratio = report.max_deviation / step;
  return report;
}

}  // namespace deed

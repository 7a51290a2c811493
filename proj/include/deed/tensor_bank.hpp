#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "deed/grid.hpp"
#include "deed/params.hpp"
#include "deed/variational.hpp"

namespace deed {

/// Edge-enhancing matrix for gradient g: eigenvalue 1 along the edge
/// (perpendicular to g) and (1 + |g|^2)^(-mu/2) across it (parallel to g).
/// Returns the identity at g = 0, the continuous extension for every mu.
SymTensor2 eed_matrix(Vec2 g, double mu);

/// g = gradient_central(mollify(u, sigma)); D = eed_matrix(g, mu) pixel-wise.
TensorField eed_tensor(const ScalarField& u, const TensorParams& params);

/// (eps + |grad|^2)^(p/2).
double gradient_weight(double grad_norm_squared, double p, double eps);

/// eed_tensor(u) scaled by gradient_weight(|gradient_central(mollify(u, delta))|^2).
TensorField weighted_eed_tensor(const ScalarField& u, const TensorParams& params);

struct GalerkinBasis {
  std::vector<ScalarField> functions;
  TensorConstructor generator;
};

/// L^2-normalized products sin(pi m (i+1)/(W+1)) sin(pi n (j+1)/(H+1)),
/// 1 <= m, n <= modes.
GalerkinBasis sine_basis(const Grid& grid, int modes, TensorConstructor generator);

/// c_k = (u, v_k)_{L^2}.
std::vector<double> galerkin_coefficients(const ScalarField& u, const GalerkinBasis& basis);
/// sum_k c_k v_k.
ScalarField galerkin_projection(const ScalarField& u, const GalerkinBasis& basis);
TensorField galerkin_tensor(const ScalarField& u, const GalerkinBasis& basis);

struct Point {
  double x;
  double y;
};

/// d(x, y, p): position, value and gradient of the preconditioned field to an SPD matrix.
using CoefficientMap = std::function<SymTensor2(Point position, double value, Vec2 gradient)>;

/// The default coefficient map: eed_matrix(gradient, mu).
CoefficientMap eed_coefficient_map(double mu);

/// coeff(x, v(x), gradient_central(v)(x)) pixel-wise; throws InvariantViolation
/// if the map returns a matrix that is not SPD.
TensorField apply_coefficient_map(const ScalarField& v, const CoefficientMap& coeff);

/// Tikhonov preconditioner: v = solve_I(u, s = 2, lambda_pre, K = Omega), then coeff.
/// Throws NonConvergenceError if the inner solve fails.
TensorField tikhonov_tensor(const ScalarField& u, double lambda_pre, const CoefficientMap& coeff,
                            const SolverSettings& settings = {});

/// Inpainting preconditioner: v = solve_I(u, s, lambda_pre, mask), then coeff.
/// Throws ExponentConstraintError unless 1 < s < 1 + t/2.
TensorField inpaint_tensor(const ScalarField& u, const Mask& mask, double s, double t, double lambda_pre,
                           const CoefficientMap& coeff, const SolverSettings& settings = {});

/// Constructor for a named tensor kind with the model's parameters; galerkin
/// uses sine_basis(grid, galerkin_modes) with an eed generator.
TensorConstructor make_tensor_constructor(TensorKind kind, const ModelParams& params, const Mask& mask);

/// Largest entry-wise deviation max |a - b| over all pixels.
double tensor_sup_deviation(const TensorField& a, const TensorField& b);

struct TensorContinuityReport {
  int trials = 0;
  double step = 0.0;
  double max_deviation = 0.0;  ///< max over trials of ||D(u + du) - D(u)||_inf
  double ratio = 0.0;          ///< max_deviation / step (0 at step 0)
};

/// Random perturbations du with ||du||_{W^{1,2}} = step.
TensorContinuityReport tensor_continuity_probe(const TensorConstructor& make, const ScalarField& u,
                                               int n_trials, double step, std::uint64_t seed = 0);

}  // namespace deed

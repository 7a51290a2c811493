#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "deed/grid.hpp"
#include "deed/params.hpp"

namespace deed {

/// Maps an iterate w to the frozen diffusion-tensor field D(w).
using TensorConstructor = std::function<TensorField(const ScalarField&)>;

/// Discrete energy
///
///   J[v] = 1/2 h^2 sum_x A(x) grad_h v(x) . grad_h v(x) + lambda h^2 sum_{x in K} phi_t(v(x) - f(x))
///
/// with forward differences grad_h and phi_t(r) = (r^2 + eps^2)^(t/2) - eps^t
/// (exactly r^2 at t = 2). Dropping the forward difference that leaves the grid
/// makes the zero-flux boundary condition part of the first-order condition.
struct EnergyProblem {
  TensorField tensor;
  ScalarField f;
  Mask mask;
  double lambda;
  double t;
  double eps_data = 1e-9;

  /// Grids agree, lambda > 0, t > 1, eps_data >= 0 (> 0 when t < 2), tensor SPD.
  void validate() const;
};

double data_penalty(double r, double t, double eps);
double data_penalty_slope(double r, double t, double eps);
double data_penalty_curvature(double r, double t, double eps);

double energy(const EnergyProblem& problem, const ScalarField& v);
/// Data part lambda h^2 sum_K phi_t(v - f) of the energy.
double data_term(const EnergyProblem& problem, const ScalarField& v);
/// Exact gradient of energy(): h^2 G^T A G v + lambda h^2 chi_K phi_t'(v - f).
ScalarField energy_gradient(const EnergyProblem& problem, const ScalarField& v);
/// Hessian of energy() at v applied to d.
ScalarField energy_hessian_apply(const EnergyProblem& problem, const ScalarField& v,
                                 const ScalarField& d);

struct SolveReport {
  ScalarField solution;
  int iterations = 0;
  double final_gradient_norm = 0.0;  ///< sup-norm over free pixels
  double final_energy = 0.0;
  bool converged = false;
  std::string method;                 ///< "cg" or "newton"
  std::vector<double> energy_history; ///< energy after every accepted step, starting value first
  std::vector<double> gradient_history;
  std::string diagnostics;
};

/// One "iteration,energy,gradient_norm" row per history entry, header first.
void write_solve_log(const SolveReport& report, std::ostream& out);

/// Minimizes problem's energy from `start`.
///
/// Pixels flagged in `pinned` are held at zero (Dirichlet elimination); an
/// empty span pins nothing. t = 2 runs Jacobi-preconditioned CG on the linear
/// first-order system, any other t runs damped Newton with truncated
/// CG directions and Armijo backtracking.
SolveReport minimize_energy(const EnergyProblem& problem, const ScalarField& start,
                            const SolverSettings& settings,
                            std::span<const std::uint8_t> pinned = {});

EnergyProblem make_energy_problem(TensorField tensor, const ScalarField& f, const Mask& mask,
                                  const ModelParams& params);

/// The solution operator: minimizer of the energy with tensor frozen at D(w),
/// warm-started from w.
SolveReport solve_T(const ScalarField& w, const ScalarField& data, const Mask& mask,
                    const ModelParams& params, const TensorConstructor& make_tensor);

/// E[K, 0, f] - E[K, T(w), f]; non-negative up to the inner tolerance for every w.
double data_ball_margin(const SolveReport& report, const EnergyProblem& problem);

}  // namespace deed

#pragma once

#include <cstdint>
#include <vector>

#include "deed/grid.hpp"
#include "deed/params.hpp"
#include "deed/variational.hpp"

namespace deed {

/// Inpainting-type preconditioner: minimize
///
///   h^2 sum |grad_h u|^2 + lambda h^2 sum_{x in K} phi_s(u - w)
///
/// over fields that vanish on the outer ring of pixels.
struct InpaintProblem {
  ScalarField w;
  Mask mask;
  double s;
  double lambda;
  double eps_data = 1e-9;

  void validate() const;
  /// The same energy written as an EnergyProblem with the tensor 2 * Id.
  EnergyProblem as_energy_problem() const;
};

/// Flags of the pixels held at zero: the outer ring.
std::vector<std::uint8_t> dirichlet_boundary(const Grid& grid);

/// h^2 sum |grad_h u|^2.
double dirichlet_energy(const ScalarField& u);
double inpaint_energy(const InpaintProblem& problem, const ScalarField& u);

/// The operator I(w), solved from the zero field.
SolveReport solve_I(const ScalarField& w, double s, double lambda, const Mask& mask,
                    const SolverSettings& settings = {}, double eps_data = 1e-9);

struct IContinuityReport {
  std::vector<double> steps;
  std::vector<double> deviations;  ///< ||I(w + dw) - I(w)||_{W^{1,2}}
  std::vector<double> ratios;      ///< deviation / step (0 where step is 0)
  bool monotone = true;            ///< deviations non-increasing along the steps
};

/// Perturbs w along one random direction normalized to ||dw||_{W^{1,2}} = 1,
/// scaled by each step in turn. Steps must be non-negative and non-increasing.
IContinuityReport i_continuity_probe(const ScalarField& w, const std::vector<double>& steps, double s,
                                     double lambda, const Mask& mask, std::uint64_t seed = 0,
                                     const SolverSettings& settings = {});

/// Discrete W^{2,p} seminorm proxy (h^2 sum |u_xx|^p + 2|u_xy|^p + |u_yy|^p)^(1/p)
/// over the pixels where all second differences exist.
double second_difference_norm(const ScalarField& u, double p);

struct IBoundednessReport {
  double radius;
  double t;
  double s;
  double p;  ///< t / (s - 1)
  int samples;
  double max_norm;  ///< largest second_difference_norm(I(w), p) over the batch
};

/// Samples w with ||w||_{L^t(K)} <= radius and records the largest
/// second-difference p-norm of I(w). Throws ExponentConstraintError unless
/// 1 < s < 1 + t/2.
IBoundednessReport i_boundedness_probe(const Grid& grid, const Mask& mask, double radius, double t,
                                       double s, double lambda, int n_samples, std::uint64_t seed = 0,
                                       const SolverSettings& settings = {});

/// L^t(K) norm (h^2 sum_K |w|^t)^(1/t).
double norm_lt(const ScalarField& w, const Mask& mask, double t);

}  // namespace deed

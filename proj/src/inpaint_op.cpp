#include "deed/inpaint_op.hpp"

#include <cmath>
#include <random>

#include "deed/errors.hpp"

namespace deed {

void InpaintProblem::validate() const {
  require_same_grid(w.grid(), mask.grid(), "InpaintProblem");
  if (!(s > 1.0) || !std::isfinite(s)) throw ConfigError("InpaintProblem: s must be greater than 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("InpaintProblem: lambda must be positive");
  if (!(eps_data >= 0.0)) throw ConfigError("InpaintProblem: eps_data must be non-negative");
}

EnergyProblem InpaintProblem::as_energy_problem() const {
  TensorField twice_identity(w.grid());
  for (std::size_t k = 0; k < twice_identity.size(); ++k) twice_identity[k] = {2.0, 0.0, 2.0};
  return EnergyProblem{std::move(twice_identity), w, mask, lambda, s, eps_data};
}

std::vector<std::uint8_t> dirichlet_boundary(const Grid& grid) {
  std::vector<std::uint8_t> pinned(grid.size(), 0);
  for (int j = 0; j < grid.height(); ++j) {
    for (int i = 0; i < grid.width(); ++i) {
      const bool ring = i == 0 || j == 0 || i == grid.width() - 1 || j == grid.height() - 1;
      pinned[grid.index(i, j)] = ring ? 1 : 0;
    }
  }
  return pinned;
}

double dirichlet_energy(const ScalarField& u) {
  const VectorField d = gradient_forward(u);
  std::vector<double> terms(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) terms[k] = d[k].norm_squared();
  return u.grid().cell_area() * pairwise_sum(terms);
}

double inpaint_energy(const InpaintProblem& problem, const ScalarField& u) {
  return energy(problem.as_energy_problem(), u);
}

SolveReport solve_I(const ScalarField& w, double s, double lambda, const Mask& mask,
                    const SolverSettings& settings, double eps_data) {
  const InpaintProblem problem{w, mask, s, lambda, eps_data};
  problem.validate();
  const std::vector<std::uint8_t> pinned = dirichlet_boundary(w.grid());
  return minimize_energy(problem.as_energy_problem(), ScalarField(w.grid()), settings, pinned);
}

namespace {

ScalarField random_unit_direction(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  ScalarField d(grid);
  for (auto& v : d.values()) v = uniform(rng);
  return (1.0 / norm_w12(d)) * d;
}

ScalarField solved(const ScalarField& w, double s, double lambda, const Mask& mask,
                   const SolverSettings& settings) {
  SolveReport r = solve_I(w, s, lambda, mask, settings);
  if (!r.converged) throw NonConvergenceError("inpainting operator: " + r.diagnostics);
  return std::move(r.solution);
}

}  // namespace

IContinuityReport i_continuity_probe(const ScalarField& w, const std::vector<double>& steps, double s,
                                     double lambda, const Mask& mask, std::uint64_t seed,
                                     const SolverSettings& settings) {
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] >= 0.0) || (k > 0 && steps[k] > steps[k - 1])) {
      throw ConfigError("i_continuity_probe: steps must be non-negative and non-increasing");
    }
  }
  std::mt19937_64 rng(seed);
  const ScalarField direction = random_unit_direction(w.grid(), rng);
  const ScalarField base = solved(w, s, lambda, mask, settings);

  IContinuityReport report;
  report.steps = steps;
  for (double step : steps) {
    const double dev =
        step == 0.0 ? 0.0 : norm_w12(solved(w + step * direction, s, lambda, mask, settings) - base);
    if (!report.deviations.empty() && dev > report.deviations.back()) report.monotone = false;
    report.deviations.push_back(dev);
    report.ratios.push_back(step == 0.0 ? 0.0 : dev / step);
  }
  return report;
}

double second_difference_norm(const ScalarField& u, double p) {
  const Grid& g = u.grid();
  const double inv_h2 = 1.0 / g.cell_area();
  std::vector<double> terms;
  for (int j = 1; j + 1 < g.height(); ++j) {
    for (int i = 1; i + 1 < g.width(); ++i) {
      const double uxx = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) * inv_h2;
      const double uyy = (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) * inv_h2;
      const double uxy = (u(i + 1, j + 1) - u(i + 1, j) - u(i, j + 1) + u(i, j)) * inv_h2;
      terms.push_back(std::pow(std::abs(uxx), p) + 2.0 * std::pow(std::abs(uxy), p) +
                      std::pow(std::abs(uyy), p));
    }
  }
  return std::pow(g.cell_area() * pairwise_sum(terms), 1.0 / p);
}

double norm_lt(const ScalarField& w, const Mask& mask, double t) {
  require_same_grid(w.grid(), mask.grid(), "norm_lt");
  std::vector<double> terms(w.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (mask[k]) terms[k] = std::pow(std::abs(w[k]), t);
  }
  return std::pow(w.grid().cell_area() * pairwise_sum(terms), 1.0 / t);
}

IBoundednessReport i_boundedness_probe(const Grid& grid, const Mask& mask, double radius, double t,
                                       double s, double lambda, int n_samples, std::uint64_t seed,
                                       const SolverSettings& settings) {
  check_inpaint_exponents(s, t);
  if (!(radius > 0.0)) throw ConfigError("i_boundedness_probe: radius must be positive");
  if (n_samples < 1) throw ConfigError("i_boundedness_probe: need at least one sample");

  const double p = t / (s - 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::uniform_real_distribution<double> fraction(0.0, 1.0);
  IBoundednessReport report{radius, t, s, p, n_samples, 0.0};
  for (int n = 0; n < n_samples; ++n) {
    ScalarField w(grid);
    for (auto& v : w.values()) v = uniform(rng);
    const double norm = norm_lt(w, mask, t);
    const double target = radius * (1.0 - fraction(rng));  // in (0, radius]
    if (norm > 0.0) w = (target / norm) * w;
    report.max_norm = std::max(report.max_norm, second_difference_norm(solved(w, s, lambda, mask, settings), p));
  }
  return report;
}

}  // namespace deed

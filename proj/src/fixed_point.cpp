#include "deed/fixed_point.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "deed/errors.hpp"

namespace deed {

namespace {
constexpr double kMarginTolerance = 1e-9;
}

void FixedPointConfig::validate() const {
  if (max_outer < 1) throw ConfigError("max_outer must be at least 1");
  if (!(tol_fp > 0.0)) throw ConfigError("tol_fp must be positive");
  if (!(tol_residual > 0.0)) throw ConfigError("tol_residual must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (init == InitKind::Custom && !custom_init) throw ConfigError("init = custom needs a start field");
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Converged: return "converged";
    case Outcome::MaxIterations: return "max-iterations";
    case Outcome::InnerSolveFailed: return "inner-solve-failed";
    case Outcome::InvariantViolated: return "invariant-violated";
  }
  return "unknown";
}

void FixedPointTrace::write_csv(std::ostream& out) const {
  out << "iter,step_sup,energy,residual_sup,ball_margin\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.step_sup, r.energy,
                  r.residual_sup, r.ball_margin);
    out << line;
  }
}

ScalarField quasilinear_residual(const ScalarField& u, const ScalarField& f, const Mask& mask,
                                 const ModelParams& params, const TensorConstructor& make_tensor) {
  return energy_gradient(make_energy_problem(make_tensor(u), f, mask, params), u);
}

FixedPointResult run_fixed_point(const ScalarField& f, const Mask& mask, const ModelParams& params,
                                 const TensorConstructor& make_tensor, const FixedPointConfig& config) {
  config.validate();
  require_same_grid(f.grid(), mask.grid(), "run_fixed_point");

  ScalarField u(f.grid());
  switch (config.init) {
    case InitKind::Data:
      for (std::size_t k = 0; k < u.size(); ++k) u[k] = mask[k] ? f[k] : 0.0;
      break;
    case InitKind::Zero:
      break;
    case InitKind::Custom:
      require_same_grid(config.custom_init->grid(), f.grid(), "run_fixed_point");
      u = *config.custom_init;
      break;
  }

  FixedPointResult result{u, {}};
  FixedPointTrace& trace = result.trace;
  double best_residual = std::numeric_limits<double>::infinity();

  EnergyProblem problem = make_energy_problem(make_tensor(u), f, mask, params);
  for (int k = 1; k <= config.max_outer; ++k) {
    const SolveReport inner = minimize_energy(problem, u, params.solver);
    if (!inner.converged) {
      trace.outcome = Outcome::InnerSolveFailed;
      trace.diagnostics = "outer iteration " + std::to_string(k) + ": " + inner.diagnostics;
      return result;
    }
    const double margin = data_ball_margin(inner, problem);

    ScalarField next = inner.solution;
    if (config.damping < 1.0) next = (1.0 - config.damping) * u + config.damping * inner.solution;
    const double step = sup_distance(next, u);

    // The tensor at the new iterate serves both as the residual certificate
    // and as the frozen tensor of the next T-application.
    problem = make_energy_problem(make_tensor(next), f, mask, params);
    const double residual = sup_norm(energy_gradient(problem, next));
    trace.rows.push_back({k, step, energy(problem, next), residual, margin});
    u = std::move(next);

    if (residual < best_residual) {
      best_residual = residual;
      result.solution = u;
    }
    if (margin < -kMarginTolerance) {
      std::ostringstream msg;
      msg << "outer iteration " << k << ": data-ball margin " << margin << " below -1e-9";
      trace.outcome = Outcome::InvariantViolated;
      trace.diagnostics = msg.str();
      return result;
    }
    if (step <= config.tol_fp && residual <= config.tol_residual) {
      trace.outcome = Outcome::Converged;
      result.solution = u;
      return result;
    }
  }
  trace.outcome = Outcome::MaxIterations;
  trace.diagnostics = "no fixed point within " + std::to_string(config.max_outer) +
                      " outer iterations (best residual " + std::to_string(best_residual) + ")";
  return result;
}

}  // namespace deed

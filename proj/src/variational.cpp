#include "deed/variational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "deed/errors.hpp"

namespace deed {

void EnergyProblem::validate() const {
  require_same_grid(tensor.grid(), f.grid(), "EnergyProblem");
  require_same_grid(mask.grid(), f.grid(), "EnergyProblem");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("EnergyProblem: lambda must be positive");
  if (!(t > 1.0) || !std::isfinite(t)) throw ConfigError("EnergyProblem: t must be greater than 1");
  if (!(eps_data >= 0.0)) throw ConfigError("EnergyProblem: eps_data must be non-negative");
  if (t < 2.0 && eps_data == 0.0) {
    throw ConfigError("EnergyProblem: t < 2 needs eps_data > 0 (|r|^t has unbounded curvature at 0)");
  }
  if (!f.all_finite()) throw InvariantViolation("EnergyProblem: data has non-finite values");
  tensor.check_positive_definite("EnergyProblem");
}

// ---------------------------------------------------------------- penalty

double data_penalty(double r, double t, double eps) {
  if (t == 2.0) return r * r;
  if (eps == 0.0) return std::pow(std::abs(r), t);
  return std::pow(r * r + eps * eps, 0.5 * t) - std::pow(eps, t);
}

double data_penalty_slope(double r, double t, double eps) {
  if (t == 2.0) return 2.0 * r;
  if (r == 0.0) return 0.0;
  return t * r * std::pow(r * r + eps * eps, 0.5 * (t - 2.0));
}

double data_penalty_curvature(double r, double t, double eps) {
  if (t == 2.0) return 2.0;
  const double q = r * r + eps * eps;
  if (q == 0.0) return 0.0;  // t > 2 here; validate() rejects t < 2 with eps = 0
  return t * std::pow(q, 0.5 * (t - 4.0)) * ((t - 1.0) * r * r + eps * eps);
}

// ---------------------------------------------------------------- operators

namespace {

// out = h^2 G^T A G v, fused.
void apply_diffusion(const TensorField& a, std::span<const double> v, std::span<double> out) {
  const Grid& g = a.grid();
  const int w = g.width();
  const int ht = g.height();
  const double inv_h = 1.0 / g.spacing();
  const double scale = g.cell_area() * inv_h;
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j < ht; ++j) {
    for (int i = 0; i < w; ++i) {
      const std::size_t k = g.index(i, j);
      const bool has_x = i + 1 < w;
      const bool has_y = j + 1 < ht;
      const Vec2 d{has_x ? (v[k + 1] - v[k]) * inv_h : 0.0, has_y ? (v[k + w] - v[k]) * inv_h : 0.0};
      const Vec2 q = a[k].apply(d);
      if (has_x) {
        out[k + 1] += scale * q.x;
        out[k] -= scale * q.x;
      }
      if (has_y) {
        out[k + w] += scale * q.y;
        out[k] -= scale * q.y;
      }
    }
  }
}

// Diagonal of h^2 G^T A G.
std::vector<double> diffusion_diagonal(const TensorField& a) {
  const Grid& g = a.grid();
  const int w = g.width();
  const int ht = g.height();
  std::vector<double> diag(g.size(), 0.0);
  for (int j = 0; j < ht; ++j) {
    for (int i = 0; i < w; ++i) {
      const std::size_t k = g.index(i, j);
      const double sx = i + 1 < w ? 1.0 : 0.0;
      const double sy = j + 1 < ht ? 1.0 : 0.0;
      diag[k] += a[k].a11 * sx + 2.0 * a[k].a12 * sx * sy + a[k].a22 * sy;
      if (i + 1 < w) diag[k + 1] += a[k].a11;
      if (j + 1 < ht) diag[k + w] += a[k].a22;
    }
  }
  return diag;
}

double diffusion_energy(const TensorField& a, const ScalarField& v) {
  const VectorField d = gradient_forward(v);
  std::vector<double> terms(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) terms[k] = a[k].quadratic_form(d[k]);
  return 0.5 * v.grid().cell_area() * pairwise_sum(terms);
}

double dot(std::span<const double> a, std::span<const double> b) {
  std::vector<double> p(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) p[k] = a[k] * b[k];
  return pairwise_sum(p);
}

double sup_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

bool is_pinned(std::span<const std::uint8_t> pinned, std::size_t k) {
  return !pinned.empty() && pinned[k] != 0;
}

void zero_pinned(std::span<const std::uint8_t> pinned, std::span<double> x) {
  if (pinned.empty()) return;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (pinned[k]) x[k] = 0.0;
  }
}

}  // namespace

double data_term(const EnergyProblem& problem, const ScalarField& v) {
  require_same_grid(problem.f.grid(), v.grid(), "data_term");
  std::vector<double> terms(v.size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (problem.mask[k]) terms[k] = data_penalty(v[k] - problem.f[k], problem.t, problem.eps_data);
  }
  return problem.lambda * v.grid().cell_area() * pairwise_sum(terms);
}

double energy(const EnergyProblem& problem, const ScalarField& v) {
  require_same_grid(problem.tensor.grid(), v.grid(), "energy");
  return diffusion_energy(problem.tensor, v) + data_term(problem, v);
}

ScalarField energy_gradient(const EnergyProblem& problem, const ScalarField& v) {
  require_same_grid(problem.tensor.grid(), v.grid(), "energy_gradient");
  require_same_grid(problem.f.grid(), v.grid(), "energy_gradient");
  ScalarField out(v.grid());
  apply_diffusion(problem.tensor, v.values(), out.values());
  const double weight = problem.lambda * v.grid().cell_area();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (problem.mask[k]) {
      out[k] += weight * data_penalty_slope(v[k] - problem.f[k], problem.t, problem.eps_data);
    }
  }
  return out;
}

ScalarField energy_hessian_apply(const EnergyProblem& problem, const ScalarField& v,
                                 const ScalarField& d) {
  require_same_grid(problem.tensor.grid(), v.grid(), "energy_hessian_apply");
  require_same_grid(d.grid(), v.grid(), "energy_hessian_apply");
  ScalarField out(v.grid());
  apply_diffusion(problem.tensor, d.values(), out.values());
  const double weight = problem.lambda * v.grid().cell_area();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (problem.mask[k]) {
      out[k] += weight * data_penalty_curvature(v[k] - problem.f[k], problem.t, problem.eps_data) * d[k];
    }
  }
  return out;
}

void write_solve_log(const SolveReport& report, std::ostream& out) {
  out << "iteration,energy,gradient_norm\n";
  char line[96];
  const std::size_t n = std::min(report.energy_history.size(), report.gradient_history.size());
  for (std::size_t k = 0; k < n; ++k) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", k, report.energy_history[k],
                  report.gradient_history[k]);
    out << line;
  }
}

// ---------------------------------------------------------------- solvers

namespace {

struct Workspace {
  const EnergyProblem& problem;
  std::span<const std::uint8_t> pinned;
  std::size_t n;
};

// Jacobi-preconditioned CG for H x = b on the free pixels, where H is
// h^2 G^T A G + diag(curvature). Stops at ||r|| <= rel_tol * ref and
// sup|r| <= abs_tol, on a non-positive curvature direction, or at the cap.
// `on_step` sees every iterate.
struct CgOutcome {
  int iterations = 0;
  bool hit_negative_curvature = false;
};

template <class OnStep>
CgOutcome pcg(const Workspace& ws, std::span<const double> curvature, std::span<const double> b,
              std::span<double> x, double rel_tol, double abs_tol, int max_iter, OnStep on_step) {
  const TensorField& a = ws.problem.tensor;
  const std::size_t n = ws.n;
  std::vector<double> diag = diffusion_diagonal(a);
  for (std::size_t k = 0; k < n; ++k) {
    diag[k] += curvature[k];
    if (!(diag[k] > 0.0)) diag[k] = 1.0;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  apply_diffusion(a, x, q);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k] - curvature[k] * x[k];
  zero_pinned(ws.pinned, r);

  const double ref = std::max(std::sqrt(dot(b, b)), std::sqrt(dot(r, r)));
  CgOutcome outcome;
  auto done = [&](std::span<const double> res) {
    const double norm = std::sqrt(dot(res, res));
    return norm == 0.0 || (norm <= rel_tol * ref && sup_abs(res) <= abs_tol);
  };
  if (done(r)) return outcome;

  for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
  zero_pinned(ws.pinned, z);
  p = z;
  double rz = dot(r, z);

  for (int it = 0; it < max_iter; ++it) {
    apply_diffusion(a, p, q);
    for (std::size_t k = 0; k < n; ++k) q[k] += curvature[k] * p[k];
    zero_pinned(ws.pinned, q);
    const double curv = dot(p, q);
    if (!(curv > 0.0)) {
      outcome.hit_negative_curvature = true;
      break;
    }
    const double alpha = rz / curv;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    ++outcome.iterations;
    on_step(std::span<const double>(x), std::span<const double>(r));
    if (done(r)) break;
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
    zero_pinned(ws.pinned, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  return outcome;
}

double free_sup(const ScalarField& g, std::span<const std::uint8_t> pinned) {
  double m = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!is_pinned(pinned, k)) m = std::max(m, std::abs(g[k]));
  }
  return m;
}

ScalarField projected_gradient(const EnergyProblem& problem, const ScalarField& v,
                               std::span<const std::uint8_t> pinned) {
  ScalarField g = energy_gradient(problem, v);
  zero_pinned(pinned, g.values());
  return g;
}

// Size of the gradient change caused by perturbing each pixel by a few ulps.
// For t < 2 near r = 0 the data curvature is of order lambda eps_data^(t-2),
// and no representable iterate has a gradient below this.
double gradient_rounding_floor(const EnergyProblem& problem, const ScalarField& v,
                               std::span<const std::uint8_t> pinned) {
  const std::vector<double> diag = diffusion_diagonal(problem.tensor);
  const double weight = problem.lambda * v.grid().cell_area();
  constexpr double kUlps = 4.0 * std::numeric_limits<double>::epsilon();
  double floor = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (is_pinned(pinned, k)) continue;
    double curvature = diag[k];
    double scale = std::abs(v[k]);
    if (problem.mask[k]) {
      curvature += weight * data_penalty_curvature(v[k] - problem.f[k], problem.t, problem.eps_data);
      scale = std::max(scale, std::abs(problem.f[k]));
    }
    floor = std::max(floor, kUlps * curvature * scale);
  }
  return floor;
}

void finish(SolveReport& report, const EnergyProblem& problem, std::span<const std::uint8_t> pinned,
            const SolverSettings& settings) {
  report.final_energy = energy(problem, report.solution);
  report.final_gradient_norm = free_sup(projected_gradient(problem, report.solution, pinned), pinned);
  report.converged = report.final_gradient_norm <= settings.tol_inner ||
                     report.final_gradient_norm <= gradient_rounding_floor(problem, report.solution, pinned);
  if (report.converged) report.diagnostics.clear();
  if (!report.converged && report.diagnostics.empty()) {
    std::ostringstream msg;
    msg << report.method << ": gradient sup-norm " << report.final_gradient_norm
        << " above tolerance " << settings.tol_inner << " after " << report.iterations
        << " iterations";
    report.diagnostics = msg.str();
  }
}

SolveReport minimize_linear(const EnergyProblem& problem, ScalarField x, const SolverSettings& settings,
                            std::span<const std::uint8_t> pinned) {
  const Grid& grid = x.grid();
  const std::size_t n = grid.size();
  const double weight = 2.0 * problem.lambda * grid.cell_area();
  std::vector<double> curvature(n, 0.0);
  std::vector<double> b(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (problem.mask[k] && !is_pinned(pinned, k)) {
      curvature[k] = weight;
      b[k] = weight * problem.f[k];
    }
  }

  SolveReport report{x, 0, 0.0, 0.0, false, "cg", {}, {}, {}};
  report.energy_history.push_back(energy(problem, x));
  report.gradient_history.push_back(free_sup(projected_gradient(problem, x, pinned), pinned));

  const Workspace ws{problem, pinned, n};
  const int cap = settings.cg_max_factor * static_cast<int>(n);
  ScalarField probe(grid);
  for (int round = 0; round <= settings.cg_restarts; ++round) {
    if (free_sup(projected_gradient(problem, x, pinned), pinned) <= settings.tol_inner &&
        round > 0) {
      break;
    }
    const CgOutcome out = pcg(ws, curvature, b, x.values(), settings.cg_rel_tol, settings.tol_inner, cap,
                              [&](std::span<const double> xs, std::span<const double> rs) {
                                std::copy(xs.begin(), xs.end(), probe.values().begin());
                                report.energy_history.push_back(energy(problem, probe));
                                report.gradient_history.push_back(sup_abs(rs));
                              });
    report.iterations += out.iterations;
    if (out.iterations == 0) break;
  }
  // Iterative refinement on the true residual once the tolerance is met. A
  // nearly singular diffusion tensor leaves a visible solution error behind a
  // small gradient. Corrections are kept while they strictly reduce it.
  double g_sup = free_sup(projected_gradient(problem, x, pinned), pinned);
  for (int round = 0; round < settings.cg_restarts && g_sup <= settings.tol_inner && g_sup > 0.0; ++round) {
    ScalarField residual = projected_gradient(problem, x, pinned);
    for (double& r : residual.values()) r = -r;
    std::vector<double> d(n, 0.0);
    const CgOutcome out =
        pcg(ws, curvature, residual.values(), d, 1e-6, 0.0, cap, [](std::span<const double>, std::span<const double>) {});
    ScalarField trial = x;
    for (std::size_t k = 0; k < n; ++k) trial[k] += d[k];
    const double g_trial = free_sup(projected_gradient(problem, trial, pinned), pinned);
    if (!(g_trial < g_sup)) break;
    x = std::move(trial);
    g_sup = g_trial;
    report.iterations += out.iterations;
    report.energy_history.push_back(energy(problem, x));
    report.gradient_history.push_back(g_sup);
  }
  report.solution = std::move(x);
  finish(report, problem, pinned, settings);
  return report;
}

SolveReport minimize_newton(const EnergyProblem& problem, ScalarField v, const SolverSettings& settings,
                            std::span<const std::uint8_t> pinned) {
  const Grid& grid = v.grid();
  const std::size_t n = grid.size();
  const double weight = problem.lambda * grid.cell_area();
  // Floor on the data curvature in the Newton model only; the gradient stays exact.
  const double curvature_floor = 1e-10 * weight;
  const Workspace ws{problem, pinned, n};
  const int cg_cap = settings.cg_max_factor * static_cast<int>(n);

  SolveReport report{v, 0, 0.0, 0.0, false, "newton", {}, {}, {}};
  double e = energy(problem, v);
  ScalarField g = projected_gradient(problem, v, pinned);
  double g_sup = free_sup(g, pinned);
  report.energy_history.push_back(e);
  report.gradient_history.push_back(g_sup);

  std::vector<double> curvature(n), rhs(n);
  ScalarField trial(grid);
  // Once the tolerance is met, Newton steps continue for as long as they
  // strictly reduce the energy or the gradient. Where the data curvature nearly vanishes
  // (t > 2 with r close to 0) a small gradient still leaves a visible solution
  // error, and these steps remove it down to the rounding floor.
  for (int it = 0; it < settings.newton_max; ++it) {
    const bool polishing = g_sup <= settings.tol_inner;
    for (std::size_t k = 0; k < n; ++k) {
      curvature[k] = 0.0;
      if (problem.mask[k] && !is_pinned(pinned, k)) {
        curvature[k] = std::max(
            weight * data_penalty_curvature(v[k] - problem.f[k], problem.t, problem.eps_data),
            curvature_floor);
      }
      rhs[k] = -g[k];
    }
    std::vector<double> dir(n, 0.0);
    const double g_norm = std::sqrt(dot(g.values(), g.values()));
    const double forcing = std::min(0.1, g_norm);
    pcg(ws, curvature, rhs, dir, forcing, std::numeric_limits<double>::infinity(), cg_cap,
        [](std::span<const double>, std::span<const double>) {});
    double slope = dot(g.values(), dir);
    if (!(slope < 0.0)) {
      for (std::size_t k = 0; k < n; ++k) dir[k] = -g[k];
      slope = dot(g.values(), dir);
    }

    // Armijo backtracking on the energy. For t < 2 the full Newton step tends
    // to overshoot to about -r, so the sufficient-decrease constant is large.
    // The energy is a sum of non-negative terms, so its rounding error is
    // relative to its value. Once the predicted decrease is below that error
    // the Armijo test is meaningless; the full step is then judged by the
    // gradient alone.
    constexpr double kArmijo = 0.1;
    const double e_noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(e);
    bool accepted = false;
    double e_trial = e;
    if (-slope > e_noise) {
      double step = 1.0;
      for (int ls = 0; ls < 40 && !accepted; ++ls, step *= 0.5) {
        for (std::size_t k = 0; k < n; ++k) trial[k] = v[k] + step * dir[k];
        e_trial = energy(problem, trial);
        accepted = e_trial < e && e_trial <= e + kArmijo * step * slope;
      }
    }
    ScalarField g_trial(grid);
    if (accepted) {
      g_trial = projected_gradient(problem, trial, pinned);
    } else {
      // Energy flat at rounding level: backtrack on the gradient instead. The
      // full step overshoots near the kink for t < 2, a shorter one does not.
      bool reduced = false;
      double step = 1.0;
      for (int ls = 0; ls < 40 && !reduced; ++ls, step *= 0.5) {
        for (std::size_t k = 0; k < n; ++k) trial[k] = v[k] + step * dir[k];
        e_trial = energy(problem, trial);
        g_trial = projected_gradient(problem, trial, pinned);
        reduced = free_sup(g_trial, pinned) < g_sup && e_trial <= e + e_noise;
      }
      if (!reduced) {
        if (!polishing) report.diagnostics = "newton: no step reduces the energy or the gradient";
        break;
      }
    }
    if (polishing && !(e_trial < e || (free_sup(g_trial, pinned) < g_sup && e_trial <= e + e_noise))) break;
    if (trial == v) {
      if (!polishing) report.diagnostics = "newton: stagnated at rounding level";
      break;
    }
    v = trial;
    e = e_trial;
    g = std::move(g_trial);
    g_sup = free_sup(g, pinned);
    ++report.iterations;
    report.energy_history.push_back(e);
    report.gradient_history.push_back(g_sup);
  }
  report.solution = std::move(v);
  finish(report, problem, pinned, settings);
  return report;
}

}  // namespace

SolveReport minimize_energy(const EnergyProblem& problem, const ScalarField& start,
                            const SolverSettings& settings, std::span<const std::uint8_t> pinned) {
  problem.validate();
  settings.validate();
  require_same_grid(problem.f.grid(), start.grid(), "minimize_energy");
  if (!pinned.empty() && pinned.size() != start.size()) {
    throw GridMismatch("minimize_energy: pinned flags do not match the grid");
  }
  ScalarField x = start;
  zero_pinned(pinned, x.values());
  if (problem.t == 2.0) return minimize_linear(problem, std::move(x), settings, pinned);
  return minimize_newton(problem, std::move(x), settings, pinned);
}

EnergyProblem make_energy_problem(TensorField tensor, const ScalarField& f, const Mask& mask,
                                  const ModelParams& params) {
  return EnergyProblem{std::move(tensor), f, mask, params.lambda, params.t, params.eps_data};
}

SolveReport solve_T(const ScalarField& w, const ScalarField& data, const Mask& mask,
                    const ModelParams& params, const TensorConstructor& make_tensor) {
  require_same_grid(w.grid(), data.grid(), "solve_T");
  EnergyProblem problem = make_energy_problem(make_tensor(w), data, mask, params);
  return minimize_energy(problem, w, params.solver);
}

double data_ball_margin(const SolveReport& report, const EnergyProblem& problem) {
  const ScalarField zero(problem.f.grid());
  return data_term(problem, zero) - data_term(problem, report.solution);
}

}  // namespace deed

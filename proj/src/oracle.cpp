#include "deed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include "deed/inpaint_op.hpp"
#include "deed/tensor_bank.hpp"

namespace deed::oracle {

std::vector<double> DenseMatrix::apply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) y[r] += (*this)(r, c) * x[c];
  }
  return y;
}

DenseMatrix assemble_diffusion(const TensorField& tensor) {
  const Grid& g = tensor.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  DenseMatrix k(n);
  for (int j = 0; j < g.height(); ++j) {
    for (int i = 0; i < g.width(); ++i) {
      // d/dv of the two forward differences at (i, j), as dense vectors.
      std::vector<double> ex(n, 0.0), ey(n, 0.0);
      if (i + 1 < g.width()) {
        ex[g.index(i + 1, j)] = 1.0 / h;
        ex[g.index(i, j)] = -1.0 / h;
      }
      if (j + 1 < g.height()) {
        ey[g.index(i, j + 1)] = 1.0 / h;
        ey[g.index(i, j)] = -1.0 / h;
      }
      const SymTensor2 a = tensor(i, j);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          k(r, c) += h * h *
                     (a.a11 * ex[r] * ex[c] + a.a12 * (ex[r] * ey[c] + ey[r] * ex[c]) + a.a22 * ey[r] * ey[c]);
        }
      }
    }
  }
  return k;
}

std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) throw std::runtime_error("solve_dense: singular matrix");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
    x[r] = acc / a(r, r);
  }
  return x;
}

namespace {

// |r|^t smoothed as (r^2 + e^2)^(t/2) - e^t, with its first two derivatives.
double phi(double r, double t, double e) {
  if (t == 2.0) return r * r;
  return std::pow(r * r + e * e, t / 2.0) - std::pow(e, t);
}
double dphi(double r, double t, double e) {
  if (t == 2.0) return 2.0 * r;
  if (r == 0.0) return 0.0;
  return t * r * std::pow(r * r + e * e, t / 2.0 - 1.0);
}
double ddphi(double r, double t, double e) {
  if (t == 2.0) return 2.0;
  const double q = r * r + e * e;
  if (q == 0.0) return 0.0;
  return t * std::pow(q, t / 2.0 - 1.0) + t * (t - 2.0) * r * r * std::pow(q, t / 2.0 - 2.0);
}

}  // namespace

ScalarField minimize_dense(const EnergyProblem& problem, const std::vector<std::uint8_t>& pinned, double tol) {
  const Grid& g = problem.f.grid();
  const double cell = g.cell_area();
  const DenseMatrix full = assemble_diffusion(problem.tensor);

  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (pinned.empty() || !pinned[k]) free.push_back(k);
  }
  ScalarField out(g);
  const std::size_t m = free.size();
  if (m == 0) return out;

  DenseMatrix k(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) k(r, c) = full(free[r], free[c]);
  }
  std::vector<double> in_k(m), f(m);
  for (std::size_t r = 0; r < m; ++r) {
    in_k[r] = problem.mask[free[r]] ? problem.lambda * cell : 0.0;
    f[r] = problem.f[free[r]];
  }
  const double t = problem.t;
  const double e = problem.eps_data;

  std::vector<double> v(m, 0.0);
  if (t == 2.0) {
    DenseMatrix a = k;
    std::vector<double> b(m);
    for (std::size_t r = 0; r < m; ++r) {
      a(r, r) += 2.0 * in_k[r];
      b[r] = 2.0 * in_k[r] * f[r];
    }
    v = solve_dense(a, b);
    // Refinement rounds on the residual while they shrink it.
    auto residual = [&](const std::vector<double>& x) {
      std::vector<double> res = a.apply(x);
      for (std::size_t r = 0; r < m; ++r) res[r] = b[r] - res[r];
      return res;
    };
    auto sup = [](const std::vector<double>& x) {
      double s = 0.0;
      for (double y : x) s = std::max(s, std::abs(y));
      return s;
    };
    std::vector<double> res = residual(v);
    for (int round = 0; round < 8 && sup(res) > 0.0; ++round) {
      const std::vector<double> d = solve_dense(a, res);
      std::vector<double> trial = v;
      for (std::size_t r = 0; r < m; ++r) trial[r] += d[r];
      std::vector<double> res_trial = residual(trial);
      if (!(sup(res_trial) < sup(res))) break;
      v = std::move(trial);
      res = std::move(res_trial);
    }
  } else {
    auto objective = [&](const std::vector<double>& x) {
      const std::vector<double> kx = k.apply(x);
      double acc = 0.0;
      for (std::size_t r = 0; r < m; ++r) acc += 0.5 * x[r] * kx[r] + in_k[r] * phi(x[r] - f[r], t, e);
      return acc;
    };
    for (std::size_t r = 0; r < m; ++r) v[r] = in_k[r] > 0.0 ? f[r] : 0.0;
    // Newton step and decrement g^T H^-1 g at x. The decrement weighs each
    // component by its inverse curvature, so it still measures progress where
    // the energy is flat at rounding level and the gradient sup-norm is set
    // by the stiffest pixel.
    struct Newton {
      std::vector<double> grad, step;
      double decrement;
    };
    auto newton_at = [&](const std::vector<double>& x) {
      Newton nt{k.apply(x), {}, 0.0};
      DenseMatrix hess = k;
      std::vector<double> minus_grad(m);
      for (std::size_t r = 0; r < m; ++r) {
        nt.grad[r] += in_k[r] * dphi(x[r] - f[r], t, e);
        hess(r, r) += in_k[r] * ddphi(x[r] - f[r], t, e) + 1e-14;
        minus_grad[r] = -nt.grad[r];
      }
      nt.step = solve_dense(std::move(hess), std::move(minus_grad));
      for (std::size_t r = 0; r < m; ++r) nt.decrement -= nt.grad[r] * nt.step[r];
      return nt;
    };
    Newton cur = newton_at(v);
    std::vector<double> trial(m);
    for (int it = 0; it < 500 && cur.decrement > 0.0; ++it) {
      const double e0 = objective(v);
      double gsup = 0.0;
      for (double x : cur.grad) gsup = std::max(gsup, std::abs(x));
      // Below tol, or with a predicted decrease under the rounding error of
      // the energy, steps are judged by the decrement instead of the energy.
      const bool flat =
          gsup <= tol || cur.decrement <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(e0);
      bool accepted = false;
      double alpha = 1.0;
      // Sufficient decrease rejects the overshoot to about -r that a full step
      // takes for t < 2.
      for (int ls = 0; ls < 60 && !accepted && !flat; ++ls, alpha *= 0.5) {
        for (std::size_t r = 0; r < m; ++r) trial[r] = v[r] + alpha * cur.step[r];
        const double e1 = objective(trial);
        accepted = e1 < e0 && e1 <= e0 - 0.25 * alpha * cur.decrement;
      }
      Newton next;
      if (accepted) {
        next = newton_at(trial);
      } else {
        alpha = 1.0;
        for (int ls = 0; ls < 40 && !accepted; ++ls, alpha *= 0.5) {
          for (std::size_t r = 0; r < m; ++r) trial[r] = v[r] + alpha * cur.step[r];
          next = newton_at(trial);
          accepted = next.decrement < cur.decrement;
        }
        if (!accepted) break;
      }
      v = trial;
      cur = std::move(next);
    }
  }
  for (std::size_t r = 0; r < m; ++r) out[free[r]] = v[r];
  return out;
}

std::vector<Check> selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_field = [&](const Grid& g) {
    ScalarField u(g);
    for (auto& v : u.values()) v = unit(rng);
    return u;
  };

  std::vector<Check> checks;
  for (int n : {2, 3, 4}) {
    const Grid grid(n, n);
    for (double t : {2.0, 3.0, 1.5}) {
      for (TensorKind kind : {TensorKind::Eed, TensorKind::Weighted, TensorKind::Tikhonov}) {
        ModelParams params;
        params.t = t;
        params.lambda = 0.5 + unit(rng);
        params.tensor.mu = 1.0;
        params.tensor.sigma = 1.0;
        const Mask mask = mask_full(grid);
        const ScalarField w = random_field(grid);
        const ScalarField f = random_field(grid);
        const TensorConstructor make = make_tensor_constructor(kind, params, mask);
        const SolveReport report = solve_T(w, f, mask, params, make);
        const ScalarField expected = minimize_dense(make_energy_problem(make(w), f, mask, params));
        checks.push_back({"solve_T " + std::to_string(n) + "x" + std::to_string(n) + " t=" +
                              std::to_string(t).substr(0, 3) + " " + std::string(to_string(kind)),
                          report.converged ? sup_distance(report.solution, expected) : INFINITY, 1e-8});
      }
    }
  }
  {
    const Grid grid(4, 4);
    const Mask mask = mask_full(grid);
    const ScalarField w = random_field(grid);
    SolverSettings settings;
    settings.tol_inner = 1e-13;
    const SolveReport report = solve_I(w, 2.0, 1.0, mask, settings);
    const InpaintProblem problem{w, mask, 2.0, 1.0};
    const ScalarField expected = minimize_dense(problem.as_energy_problem(), dirichlet_boundary(grid));
    checks.push_back({"solve_I 4x4 s=2", report.converged ? sup_distance(report.solution, expected) : INFINITY,
                      1e-10});
  }
  return checks;
}

}  // namespace deed::oracle

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deed/grid.hpp"
#include "deed/params.hpp"
#include "deed/variational.hpp"

namespace deed {

enum class InitKind { Data, Zero, Custom };

struct FixedPointConfig {
  int max_outer = 200;
  double tol_fp = 1e-6;        ///< sup-norm of u_{k+1} - u_k
  double tol_residual = 1e-6;  ///< sup-norm of the quasilinear residual
  double damping = 1.0;        ///< u <- (1 - damping) u + damping T(u)
  InitKind init = InitKind::Data;
  std::optional<ScalarField> custom_init;

  void validate() const;
};

struct TraceRow {
  int iter;
  double step_sup;
  double energy;        ///< energy at u_{k+1} with tensor D(u_{k+1})
  double residual_sup;
  double ball_margin;   ///< E[K, 0, f] - E[K, T(u_k), f]
};

enum class Outcome { Converged, MaxIterations, InnerSolveFailed, InvariantViolated };

std::string_view to_string(Outcome outcome);

struct FixedPointTrace {
  std::vector<TraceRow> rows;
  Outcome outcome = Outcome::MaxIterations;
  std::string diagnostics;

  /// Header "iter,step_sup,energy,residual_sup,ball_margin", LF line ends,
  /// values printed with 17 significant digits.
  void write_csv(std::ostream& out) const;
};

struct FixedPointResult {
  ScalarField solution;  ///< last iterate when converged, lowest-residual iterate otherwise
  FixedPointTrace trace;

  bool converged() const { return trace.outcome == Outcome::Converged; }
};

/// Residual of the quasilinear problem at u: the energy gradient of the
/// problem assembled with tensor D(u), evaluated at the same u. Its zero is a
/// discrete weak solution with zero conormal flux at the boundary.
ScalarField quasilinear_residual(const ScalarField& u, const ScalarField& f, const Mask& mask,
                                 const ModelParams& params, const TensorConstructor& make_tensor);

/// Damped Picard iteration u_{k+1} = (1 - theta) u_k + theta T(u_k). Stops once
/// the step and the quasilinear residual are both below tolerance.
FixedPointResult run_fixed_point(const ScalarField& f, const Mask& mask, const ModelParams& params,
                                 const TensorConstructor& make_tensor, const FixedPointConfig& config);

}  // namespace deed

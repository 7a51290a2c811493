#pragma once

#include <string>
#include <string_view>

namespace deed {

/// Inner-solver tolerances and caps.
struct SolverSettings {
  double tol_inner = 1e-8;    ///< sup-norm of the energy gradient at acceptance
  double cg_rel_tol = 1e-10;  ///< relative residual for the linear (t = 2) path
  int newton_max = 200;
  int cg_max_factor = 10;     ///< CG cap = cg_max_factor * pixel count
  int cg_restarts = 8;        ///< restarts from the true residual on the linear path

  void validate() const;
};

/// Parameters of the diffusion-tensor constructors.
struct TensorParams {
  double sigma = 1.0;        ///< mollification scale of the tensor argument
  double mu = 1.0;           ///< exponent of (1 + |g|^2)^(-mu/2); any sign
  double delta = 1.0;        ///< second smoothing scale (weighted tensor)
  double p_weight = 2.0;     ///< weight exponent p > 1 (weighted tensor)
  double eps_weight = 1e-6;  ///< floor inside (eps + |grad u_delta|^2)^(p/2)

  void validate() const;
};

enum class TensorKind { Eed, Weighted, Galerkin, Tikhonov, Inpaint };

std::string_view to_string(TensorKind kind);
/// Parses eed | weighted | galerkin | tikhonov | inpaint; throws ConfigError otherwise.
TensorKind parse_tensor_kind(std::string_view name);

struct ModelParams {
  double lambda = 1.0;      ///< data weight of the outer energy
  double t = 2.0;           ///< data exponent, t > 1
  double eps_data = 1e-9;   ///< smoothing of |r|^t (ignored at t = 2)
  TensorParams tensor;
  double s = 2.0;           ///< inpainting exponent of the preconditioner
  double lambda_pre = 1.0;  ///< data weight of the preconditioner
  int galerkin_modes = 3;   ///< sine modes per axis of the default Galerkin basis
  SolverSettings solver;

  /// Checks every field, plus 1 < s < 1 + t/2 when kind is Inpaint.
  void validate(TensorKind kind) const;
};

/// Throws ExponentConstraintError unless 1 < s < 1 + t/2.
void check_inpaint_exponents(double s, double t);

}  // namespace deed

#include "deed/params.hpp"

#include <cmath>
#include <sstream>

#include "deed/errors.hpp"

namespace deed {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void SolverSettings::validate() const {
  require(tol_inner > 0.0 && finite(tol_inner), "tol_inner must be positive");
  require(cg_rel_tol > 0.0 && finite(cg_rel_tol), "cg_rel_tol must be positive");
  require(newton_max >= 1, "newton_max must be at least 1");
  require(cg_max_factor >= 1, "cg_max_factor must be at least 1");
  require(cg_restarts >= 0, "cg_restarts must be non-negative");
}

void TensorParams::validate() const {
  require(sigma > 0.0 && finite(sigma), "sigma must be positive");
  require(finite(mu), "mu must be finite");
  require(delta > 0.0 && finite(delta), "delta must be positive");
  require(p_weight > 1.0 && finite(p_weight), "p_weight must be greater than 1");
  require(eps_weight > 0.0 && finite(eps_weight), "eps_weight must be positive");
}

std::string_view to_string(TensorKind kind) {
  switch (kind) {
    case TensorKind::Eed: return "eed";
    case TensorKind::Weighted: return "weighted";
    case TensorKind::Galerkin: return "galerkin";
    case TensorKind::Tikhonov: return "tikhonov";
    case TensorKind::Inpaint: return "inpaint";
  }
  return "unknown";
}

TensorKind parse_tensor_kind(std::string_view name) {
  for (auto kind : {TensorKind::Eed, TensorKind::Weighted, TensorKind::Galerkin,
                    TensorKind::Tikhonov, TensorKind::Inpaint}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown tensor kind '" + std::string(name) +
                    "' (expected eed | weighted | galerkin | tikhonov | inpaint)");
}

void check_inpaint_exponents(double s, double t) {
  if (!(s > 1.0 && s < 1.0 + 0.5 * t)) {
    std::ostringstream msg;
    msg << "inpainting exponents violate 1 < s < 1 + t/2 (s = " << s << ", t = " << t
        << ", 1 + t/2 = " << 1.0 + 0.5 * t << ")";
    throw ExponentConstraintError(msg.str());
  }
}

void ModelParams::validate(TensorKind kind) const {
  require(lambda > 0.0 && finite(lambda), "lambda must be positive");
  require(t > 1.0 && finite(t), "t must be greater than 1");
  require(eps_data >= 0.0 && finite(eps_data), "eps_data must be non-negative");
  require(lambda_pre > 0.0 && finite(lambda_pre), "lambda_pre must be positive");
  require(s > 1.0 && finite(s), "s must be greater than 1");
  require(galerkin_modes >= 1, "galerkin_modes must be at least 1");
  tensor.validate();
  solver.validate();
  if (kind == TensorKind::Inpaint) check_inpaint_exponents(s, t);
}

}  // namespace deed

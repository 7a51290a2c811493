#include "deed/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "deed/errors.hpp"
#include "deed/fixed_point.hpp"
#include "deed/inpaint_op.hpp"
#include "deed/oracle.hpp"
#include "deed/pgm.hpp"
#include "deed/run_config.hpp"
#include "deed/synthetic.hpp"
#include "deed/tensor_bank.hpp"

namespace deed::cli {

namespace {

struct Options {
  RunConfig config;
  std::string tensor_name = "eed";
  std::string init_name = "data";
  std::string config_file;
  std::string log;
  int trials = 8;
  double probe_step = 1e-3;
  int synthetic_size = 32;
};

void add_model_options(CLI::App& app, Options& o) {
  RunConfig& c = o.config;
  app.add_option("--input", c.input, "input image (binary PGM)");
  app.add_option("--mask", c.mask, "data-set mask (PGM, pixels > 0 are in K)");
  app.add_option("--output", c.output, "output image (8-bit PGM)");
  app.add_option("--tensor", o.tensor_name, "eed | weighted | galerkin | tikhonov | inpaint");
  app.add_option("--lambda", c.model.lambda, "data weight");
  app.add_option("--t", c.model.t, "data exponent t > 1");
  app.add_option("--eps-data", c.model.eps_data, "smoothing of |r|^t for t < 2");
  app.add_option("--sigma", c.model.tensor.sigma, "mollification scale");
  app.add_option("--mu", c.model.tensor.mu, "EED exponent");
  app.add_option("--delta", c.model.tensor.delta, "second smoothing scale (weighted)");
  app.add_option("--p", c.model.tensor.p_weight, "weight exponent p > 1 (weighted)");
  app.add_option("--eps-weight", c.model.tensor.eps_weight, "weight floor (weighted)");
  app.add_option("--s", c.model.s, "preconditioner exponent s");
  app.add_option("--lambda-pre", c.model.lambda_pre, "preconditioner data weight");
  app.add_option("--galerkin-modes", c.model.galerkin_modes, "sine modes per axis (galerkin)");
  app.add_option("--tol-inner", c.model.solver.tol_inner, "inner gradient tolerance");
  app.add_option("--spacing", c.spacing, "grid step h");
  app.add_option("--seed", c.seed, "RNG seed for probes");
  app.add_option("--config", o.config_file, "key=value file; command-line flags take precedence");
}

void add_fixed_point_options(CLI::App& app, Options& o) {
  FixedPointConfig& f = o.config.fixed_point;
  app.add_option("--trace", o.config.trace, "CSV trace of the outer iteration");
  app.add_option("--max-outer", f.max_outer, "outer iteration cap");
  app.add_option("--tol-fp", f.tol_fp, "step tolerance");
  app.add_option("--tol-residual", f.tol_residual, "residual tolerance");
  app.add_option("--damping", f.damping, "damping theta in (0, 1]");
  app.add_option("--init", o.init_name, "data | zero");
}

void take_last(CLI::App& app) {
  for (CLI::Option* opt : app.get_options()) {
    if (opt->get_name() != "--help") opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
}

// `--config FILE` is expanded in place into --key=value arguments placed
// before the remaining flags, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[++k];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      rest.push_back(args[k]);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw IoError("config file '" + path + "' is not readable");
  std::stringstream text;
  text << in.rdbuf();
  std::vector<std::string> expanded;
  if (!rest.empty()) expanded.push_back(rest.front());
  for (const auto& [key, value] : parse_key_value_config(text.str())) expanded.push_back("--" + key + "=" + value);
  for (std::size_t k = 1; k < rest.size(); ++k) expanded.push_back(rest[k]);
  return expanded;
}

void finalize(Options& o) {
  o.config.tensor = parse_tensor_kind(o.tensor_name);
  if (o.init_name == "data") {
    o.config.fixed_point.init = InitKind::Data;
  } else if (o.init_name == "zero") {
    o.config.fixed_point.init = InitKind::Zero;
  } else {
    throw ConfigError("unknown --init '" + o.init_name + "' (data | zero)");
  }
}

Mask load_mask(const RunConfig& c, const Grid& grid) {
  return c.mask.empty() ? mask_full(grid) : read_mask(c.mask, grid);
}

int denoise(Options& o, std::ostream& out) {
  finalize(o);
  const RunConfig& c = o.config;
  c.validate(true, true);

  const ScalarField f = read_pgm(c.input, c.spacing);
  const Mask mask = load_mask(c, f.grid());
  const TensorConstructor make = make_tensor_constructor(c.tensor, c.model, mask);
  const FixedPointResult result = run_fixed_point(f, mask, c.model, make, c.fixed_point);

  write_pgm(result.solution, c.output);
  if (!c.trace.empty()) {
    std::ofstream trace(c.trace, std::ios::binary);
    if (!trace) throw IoError("cannot open trace '" + c.trace + "'");
    result.trace.write_csv(trace);
  }
  const auto& rows = result.trace.rows;
  out << "outcome: " << to_string(result.trace.outcome) << "\n"
      << "outer iterations: " << rows.size() << "\n";
  if (!rows.empty()) {
    out << std::setprecision(6) << "final step: " << rows.back().step_sup << "\n"
        << "final residual: " << rows.back().residual_sup << "\n";
  }
  if (!result.trace.diagnostics.empty()) out << "diagnostics: " << result.trace.diagnostics << "\n";
  switch (result.trace.outcome) {
    case Outcome::Converged: return kOk;
    case Outcome::InvariantViolated: return kInvariant;
    default: return kNonConvergence;
  }
}

int inpaint_precond(Options& o, std::ostream& out) {
  finalize(o);
  RunConfig& c = o.config;
  c.validate(true, true);

  const ScalarField w = read_pgm(c.input, c.spacing);
  const Mask mask = load_mask(c, w.grid());
  const SolveReport report = solve_I(w, c.model.s, c.model.lambda_pre, mask, c.model.solver, c.model.eps_data);
  write_pgm(report.solution, c.output);
  if (!o.log.empty()) {
    std::ofstream log(o.log, std::ios::binary);
    if (!log) throw IoError("cannot open log '" + o.log + "'");
    write_solve_log(report, log);
  }
  out << "method: " << report.method << "\niterations: " << report.iterations
      << "\ngradient sup-norm: " << report.final_gradient_norm << "\n";
  if (!report.converged) {
    out << "diagnostics: " << report.diagnostics << "\n";
    return kNonConvergence;
  }
  return kOk;
}

int probe_tensor(Options& o, std::ostream& out) {
  finalize(o);
  const RunConfig& c = o.config;
  c.validate(false, false);
  if (o.trials < 1 || !(o.probe_step > 0.0)) throw ConfigError("--trials >= 1 and --step > 0 required");

  const ScalarField u = c.input.empty()
                            ? noisy_step_image(Grid(o.synthetic_size, o.synthetic_size, c.spacing), 0.2, 0.8,
                                               0.1, c.seed)
                            : read_pgm(c.input, c.spacing);
  const Mask mask = load_mask(c, u.grid());
  const TensorConstructor make = make_tensor_constructor(c.tensor, c.model, mask);

  const TensorField d = make(u);
  const double min_eig = d.min_eigenvalue();
  out << std::setprecision(9) << "tensor: " << to_string(c.tensor) << "\n"
      << "min eigenvalue: " << min_eig << "\n";
  for (int halving = 0; halving < 4; ++halving) {
    const double step = o.probe_step / (1 << halving);
    const TensorContinuityReport r = tensor_continuity_probe(make, u, o.trials, step, c.seed);
    out << "step " << step << ": max deviation " << r.max_deviation << ", ratio " << r.ratio << "\n";
  }
  if (!(min_eig > 0.0)) {
    out << "SPD check failed\n";
    return kInvariant;
  }
  return kOk;
}

int selftest(Options& o, std::ostream& out) {
  int failures = 0;
  for (const auto& check : oracle::selftest(o.config.seed)) {
    out << (check.pass() ? "[PASS] " : "[FAIL] ") << check.name << "  error " << std::scientific
        << std::setprecision(2) << check.error << " <= " << check.tolerance << "\n";
    failures += check.pass() ? 0 : 1;
  }
  out << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? kOk : kInvariant;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Edge-enhancing diffusion denoising by fixed-point iteration", "deed"};
  app.require_subcommand(1);

  CLI::App* denoise_cmd = app.add_subcommand("denoise", "run the fixed-point iteration on an image");
  add_model_options(*denoise_cmd, o);
  add_fixed_point_options(*denoise_cmd, o);

  CLI::App* inpaint_cmd = app.add_subcommand("inpaint-precond", "write the inpainting preconditioner I(w)");
  add_model_options(*inpaint_cmd, o);
  inpaint_cmd->add_option("--log", o.log, "CSV log of the inner solve");

  CLI::App* probe_cmd = app.add_subcommand("probe-tensor", "SPD scan and continuity probe of a tensor");
  add_model_options(*probe_cmd, o);
  probe_cmd->add_option("--trials", o.trials, "random perturbations per step");
  probe_cmd->add_option("--step", o.probe_step, "largest W^{1,2} perturbation size");
  probe_cmd->add_option("--size", o.synthetic_size, "synthetic image size when --input is absent");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "oracle-equivalence checks on tiny grids");
  selftest_cmd->add_option("--seed", o.config.seed, "RNG seed");

  for (CLI::App* sub : {denoise_cmd, inpaint_cmd, probe_cmd, selftest_cmd}) take_last(*sub);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "deed: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    err << "deed: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    err << "deed: " << e.what() << "\n";
    return kConfig;
  }

  try {
    if (denoise_cmd->parsed()) return denoise(o, out);
    if (inpaint_cmd->parsed()) return inpaint_precond(o, out);
    if (probe_cmd->parsed()) return probe_tensor(o, out);
    return selftest(o, out);
  } catch (const ConfigError& e) {
    err << "deed: configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const GridMismatch& e) {
    err << "deed: configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    err << "deed: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const NonConvergenceError& e) {
    err << "deed: non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const InvariantViolation& e) {
    err << "deed: invariant violation: " << e.what() << "\n";
    return kInvariant;
  }
}

}  // namespace deed::cli

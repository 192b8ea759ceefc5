#include "nk/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nk/errors.hpp"
#include "nk/extremal.hpp"
#include "nk/report.hpp"
#include "nk/solver.hpp"
#include "nk/thresholds.hpp"
#include "nk/verify.hpp"

namespace nk {

namespace {

struct Common {
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 42;
  int mesh = 0;
};

ProblemConfig load(const Common& c) {
  ProblemConfig raw = c.config_path.empty() ? desk_config(false) : load_config(c.config_path);
  if (c.mesh > 0) raw.mesh_nodes = c.mesh;
  return raw;
}

RunManifest manifest(const Common& c, const std::string& sub) {
  return {c.config_path, sub, c.seed, c.output_dir, version_string()};
}

void write_file(const Common& c, const std::string& name, const std::string& text) {
  if (c.output_dir.empty()) return;
  std::filesystem::create_directories(c.output_dir);
  std::ofstream os(std::filesystem::path(c.output_dir) / name);
  if (!os) throw Error(ErrorKind::InvalidParameter, "cannot write " + name + " in " + c.output_dir);
  os << text;
}

// "auto:frac" or a plain number; auto scales min(lambda*, lambda**), or
// lambda*** on critical configs.
double resolve_lambda(const std::string& text, const ThresholdInputs& in) {
  if (text.rfind("auto:", 0) == 0) {
    double frac = 0;
    try {
      frac = std::stod(text.substr(5));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidParameter, "bad lambda fraction: " + text);
    }
    const double base = in.cfg.critical() ? lambda_tstar(in) : std::min(lambda_star(in), lambda_dstar(in));
    return frac * base;
  }
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidParameter, "bad lambda: " + text);
  }
}

struct SolveArgs {
  std::string branch = "both";
  std::string lambda = "auto:0.5";
  bool critical = false;
};

int cmd_solve(const Common& c, const SolveArgs& a) {
  ProblemConfig raw = load(c);
  if (a.critical) raw.q = validate_config(raw).critical_exponent();
  const ValidatedConfig cfg = validate_config(raw);
  const DiscreteProblem pb(cfg);
  const ThresholdInputs in = threshold_inputs(pb, sobolev_constant(pb).value);
  const double lambda = resolve_lambda(a.lambda, in);
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be positive");
  const DiscreteProblem lp = pb.with_lambda(lambda);

  SolveOptions opt{raw.solver, std::nullopt};
  if (raw.w_weight.kind == WeightSpec::Kind::Constant && raw.w_weight.amplitude >= 0.0) {
    opt.energy_floor = coercivity_bound(in).C - 1.0;
  }

  nlohmann::json out;
  out["manifest"] = to_json(manifest(c, "solve"));
  out["thresholds"] = to_json(compute_thresholds(in, lambda));
  int code = 0;
  std::vector<Branch> branches;
  if (a.branch == "plus" || a.branch == "both") branches.push_back(Branch::Plus);
  if (a.branch == "minus" || a.branch == "both") branches.push_back(Branch::Minus);

  SolveReport plus;
  for (Branch b : branches) {
    SolveReport rep;
    try {
      DiscreteFunction init = default_bump(lp.mesh());
      if (b == Branch::Minus) {
        const Thresholds th = compute_thresholds(in, lambda);
        if (cfg.critical() && plus.converged) {
          const ExtremalFamily fam{0.05, default_delta(cfg.domain()), 0.0};
          if (auto cross = path_crossing(lp, plus.solution, cutoff_family(fam, lp.mesh(), cfg), lambda)) {
            init = *cross;
          }
        } else if (!cfg.critical()) {
          init = (2.0 * th.eta_lambda / std::pow(gagliardo_p(lp, init), 1.0 / cfg.p())) * init;
        }
      }
      rep = minimize_branch(lp, lambda, b, init, opt);
      if (b == Branch::Plus) plus = rep;
    } catch (const SolveFailure& e) {
      std::cerr << "nk solve (" << to_string(b) << "): " << e.what() << "\n";
      rep = e.partial();
      code = e.exit_code();
    }
    out[to_string(b)] = to_json(rep);
    std::ostringstream trace;
    write_trace_csv(trace, rep);
    write_file(c, std::string("trace_") + to_string(b) + ".csv", trace.str());
  }
  const std::string text = out.dump(2);
  write_file(c, "solve.json", text + "\n");
  std::cout << text << "\n";
  return code;
}

struct FiberArgs {
  std::string lambda = "auto:0.5";
  double t_min = 1e-3;
  double t_max = 1e3;
  int samples = 121;
};

int cmd_fiber(const Common& c, const FiberArgs& a) {
  if (!(a.t_min > 0.0) || !(a.t_max > a.t_min) || a.samples < 2) {
    throw Error(ErrorKind::InvalidParameter, "need 0 < t-min < t-max and at least 2 samples");
  }
  const ValidatedConfig cfg = validate_config(load(c));
  const DiscreteProblem pb(cfg);
  const ThresholdInputs in = threshold_inputs(pb, sobolev_constant(pb).value);
  const double lambda = resolve_lambda(a.lambda, in);
  const FiberProfile<double> pr = fiber_profile(pb, default_bump(pb.mesh()));
  std::ostringstream os;
  CsvWriter w(os, {"t", "phi", "dphi", "ddphi", "psi"});
  for (int i = 0; i < a.samples; ++i) {
    const double t = a.t_min * std::pow(a.t_max / a.t_min, double(i) / (a.samples - 1));
    w.row({t, phi(pr, lambda, t), phi_prime(pr, lambda, t), phi_dprime(pr, lambda, t), psi(pr, t)});
  }
  write_file(c, "fiber.csv", os.str());
  std::cout << os.str();
  return 0;
}

int cmd_thresholds(const Common& c, const std::string& lambda_text) {
  const ValidatedConfig cfg = validate_config(load(c));
  const DiscreteProblem pb(cfg);
  const ThresholdInputs in = threshold_inputs(pb, sobolev_constant(pb).value);
  const double lambda = lambda_text.empty() ? cfg.lambda() : resolve_lambda(lambda_text, in);
  const std::string text = to_json(compute_thresholds(in, lambda)).dump(2);
  write_file(c, "thresholds.json", text + "\n");
  std::cout << text << "\n";
  return 0;
}

int cmd_sobolev(const Common& c, int iterations) {
  const ValidatedConfig cfg = validate_config(load(c));
  const DiscreteProblem pb(cfg);
  const std::string text = to_json(sobolev_constant(pb, iterations)).dump(2);
  write_file(c, "sobolev.json", text + "\n");
  std::cout << text << "\n";
  return 0;
}

struct ExtremalArgs {
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05, 0.025};
  double delta = 0;
};

int cmd_extremal(const Common& c, const ExtremalArgs& a) {
  const ValidatedConfig cfg = validate_config(load(c));
  const DiscreteProblem pb(cfg);
  const double delta = a.delta > 0 ? a.delta : default_delta(cfg.domain());
  std::ostringstream os;
  write_extremal_csv(os, extremal_sweep(pb, a.epsilons, delta));
  write_file(c, "extremal.csv", os.str());
  std::cout << os.str();
  return 0;
}

int cmd_verify(const Common& c) {
  VerifyOptions opt;
  opt.base = c.config_path.empty() ? desk_config(false) : load_config(c.config_path);
  validate_config(opt.base);
  opt.seed = c.seed;
  if (c.mesh > 0) opt.mesh = c.mesh;
  const std::vector<CheckResult> results = run_verify(opt);
  const std::string table = format_table(results);
  write_file(c, "verify.txt", table);
  std::cout << table;
  const bool ok = all_passed(results);
  std::cout << (ok ? "verify: all checks passed\n" : "verify: failures present\n");
  return ok ? 0 : 3;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Two-branch solver for a fractional Kirchhoff problem with a singular term", "nk"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "key = value problem file (desk defaults otherwise)");
  app.add_option("--output-dir", common.output_dir, "also write outputs into this directory");
  app.add_option("--mesh", common.mesh, "mesh nodes, overrides the config")->check(CLI::Range(3, 1 << 20));

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "minimize on the N+ and/or N- branch");
  solve->add_option("--branch", solve_args.branch)->check(CLI::IsMember({"plus", "minus", "both"}));
  solve->add_option("--lambda", solve_args.lambda, "value or auto:frac");
  solve->add_flag("--critical", solve_args.critical, "set q to the critical exponent");

  FiberArgs fiber_args;
  CLI::App* fiber = app.add_subcommand("fiber", "fiber map samples of the default bump as CSV");
  fiber->add_option("--lambda", fiber_args.lambda, "value or auto:frac");
  fiber->add_option("--t-min", fiber_args.t_min);
  fiber->add_option("--t-max", fiber_args.t_max);
  fiber->add_option("--samples", fiber_args.samples);

  std::string threshold_lambda;
  CLI::App* thresholds = app.add_subcommand("thresholds", "threshold constants as JSON");
  thresholds->add_option("--lambda", threshold_lambda, "value or auto:frac (config lambda otherwise)");

  int sobolev_iterations = 300;
  CLI::App* sobolev = app.add_subcommand("sobolev", "discrete Sobolev constant estimate as JSON");
  sobolev->add_option("--iterations", sobolev_iterations)->check(CLI::NonNegativeNumber);

  ExtremalArgs extremal_args;
  CLI::App* extremal = app.add_subcommand("extremal", "truncated extremal family over an eps grid as CSV");
  extremal->add_option("--eps", extremal_args.epsilons, "eps values")->delimiter(',');
  extremal->add_option("--delta", extremal_args.delta, "cutoff radius");

  CLI::App* verify = app.add_subcommand("verify", "run every property suite");
  for (CLI::App* sub : {solve, fiber, thresholds, sobolev, extremal, verify}) {
    sub->add_option("--seed", common.seed, "seed for randomized suites");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(common, solve_args);
    if (*fiber) return cmd_fiber(common, fiber_args);
    if (*thresholds) return cmd_thresholds(common, threshold_lambda);
    if (*sobolev) return cmd_sobolev(common, sobolev_iterations);
    if (*extremal) return cmd_extremal(common, extremal_args);
    if (*verify) return cmd_verify(common);
  } catch (const Error& e) {
    std::cerr << "nk: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "nk: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace nk

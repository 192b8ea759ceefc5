#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "nk/errors.hpp"
#include "nk/extremal.hpp"
#include "nk/fiber.hpp"
#include "nk/solver.hpp"
#include "nk/thresholds.hpp"
#include "nk/verify.hpp"

using namespace nk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s  %s  %s\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Setup {
  DiscreteProblem pb;
  ThresholdInputs in;
};

Setup setup(ProblemConfig raw, int nodes) {
  raw.mesh_nodes = nodes;
  DiscreteProblem pb(validate_config(raw));
  ThresholdInputs in = threshold_inputs(pb, sobolev_constant(pb).value);
  return {pb, in};
}

double norm_of(const DiscreteProblem& pb, const DiscreteFunction& u) {
  return std::pow(gagliardo_p(pb, u), 1.0 / pb.config().p());
}

Outcome quadrature_oracle() {
  double worst = 0.0;
  for (bool critical : {false, true}) {
    const ValidatedConfig cfg = validate_config(desk_config(critical));
    const DiscreteProblem pb(cfg, 9);
    const DiscreteFunction u = test_profile_9(cfg.domain());
    const DiscreteFunction v = default_bump(pb.mesh());
    auto rel = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::abs(b)); };
    rel(gagliardo_p(pb, u), oracle_gagliardo(cfg, u));
    rel(weak_pairing(pb, u, v), oracle_pairing(cfg, u, v));
    rel(lp_norm_p(pb, u, cfg.p()), oracle_lp(cfg, u, cfg.p()));
    rel(lp_norm_p(pb, u, cfg.critical_exponent()), oracle_lp(cfg, u, cfg.critical_exponent()));
    rel(singular_integral(pb, u), oracle_singular(cfg, u));
    rel(F_integral(pb, u), oracle_F(cfg, u));
  }
  // every operation once at N = 257, matrix and direct paths
  const auto t0 = Clock::now();
  ProblemConfig raw = desk_config(false);
  raw.mesh_nodes = 257;
  DiscreteProblem big(validate_config(raw));
  const DiscreteFunction b = default_bump(big.mesh());
  double sink = 0.0;
  for (bool matrix : {true, false}) {
    big.form().use_matrix(matrix);
    sink += gagliardo_p(big, b) + weak_pairing(big, b, b) + lp_norm_p(big, b, 2.0) + singular_integral(big, b) +
            F_integral(big, b) + big.form().gradient(b.values).sum() + lp_load(big, b.values, 2.0).sum() +
            singular_load(big, b.values, 1e-8).sum() + f_load(big, b.values).sum();
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst <= 0.01 && elapsed < 10.0 && std::isfinite(sink);
  return {ok, fmt("worst rel err %.3e (tol 1e-2), ", worst) + fmt("N=257 runtime %.2f s (limit 10 s)", elapsed)};
}

Outcome fiber_calculus() {
  const ValidatedConfig cfg = validate_config(desk_config(false));
  Rng rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double fd_margin = 1e300, id_margin = 1e300;
  int roots = 0;
  for (int k = 0; k < 50; ++k) {
    const FiberProfile<double> pr = random_profile(cfg, rng);
    const double lambda = 0.01 + U(rng), t = 0.5 + 1.5 * U(rng);
    const double h1 = 1e-5 * t, h2 = 1e-4 * t;
    const double f0 = phi(pr, lambda, t);
    const double d1 = (phi(pr, lambda, t + h1) - phi(pr, lambda, t - h1)) / (2 * h1);
    const double d2 = (phi(pr, lambda, t + h2) - 2 * f0 + phi(pr, lambda, t - h2)) / (h2 * h2);
    const double tol = 1e-6 * (1 + std::abs(f0));
    fd_margin = std::min(fd_margin, tol - std::abs(d1 - phi_prime(pr, lambda, t)));
    fd_margin = std::min(fd_margin, tol - std::abs(d2 - phi_dprime(pr, lambda, t)));
    // roots at a lambda where they exist
    const double lam = (0.1 + 0.8 * U(rng)) * psi(pr, t_max_numeric(pr)) / (cfg.q() * pr.D);
    const NehariRoots<double> r = nehari_roots(pr, lam);
    for (double tr : {r.t1, r.t2}) {
      if (!std::isfinite(tr)) continue;
      ++roots;
      const double lhs = phi_dprime(pr, lam, tr), rhs = std::pow(tr, cfg.q() - 1.0) * psi_prime(pr, tr);
      id_margin = std::min(id_margin, 1e-8 * (1 + std::abs(lhs)) - std::abs(lhs - rhs));
    }
  }
  return {fd_margin >= 0.0 && id_margin >= 0.0 && roots == 100,
          fmt("fd worst margin %.3e, ", fd_margin) + fmt("identity worst margin %.3e over ", id_margin) +
              std::to_string(roots) + " roots"};
}

Outcome root_structure() {
  const Setup s = setup(desk_config(false), 129);
  const double lam = 0.9 * lambda_star(s.in);
  Rng rng(7);
  int good = 0;
  for (int k = 0; k < 20; ++k) {
    const FiberProfile<double> pr = fiber_profile(s.pb, random_bump(s.pb.mesh(), rng));
    try {
      const NehariRoots<double> r = nehari_roots(pr, lam);
      if (r.two_roots && r.t1 < r.t_max && r.t_max < r.t2 && psi_prime(pr, r.t1) > 0 && psi_prime(pr, r.t2) < 0) {
        ++good;
      }
    } catch (const Error&) {
    }
  }
  ProblemConfig flip = desk_config(false);
  flip.w_weight = WeightSpec::sign_flip(1.0, 0.0, 1.0);
  const Setup sf = setup(flip, 129);
  const double lam_f = 0.9 * lambda_star(sf.in);
  int single = 0, tried = 0;
  for (int k = 0; k < 20; ++k) {
    const DiscreteFunction u = random_negative_bump(sf.pb, rng);
    const FiberProfile<double> pr = fiber_profile(sf.pb, u);
    if (!(pr.D < 0.0)) continue;
    ++tried;
    try {
      const NehariRoots<double> r = nehari_roots(pr, lam_f);
      if (!r.two_roots && psi_prime(pr, r.t1) > 0.0) ++single;
    } catch (const Error&) {
    }
  }
  return {good == 20 && tried == 20 && single == 20,
          "X+ " + std::to_string(good) + "/20 two ordered roots, X- " + std::to_string(single) + "/" +
              std::to_string(tried) + " single root with psi' > 0"};
}

Outcome t_m_agreement() {
  const Setup s = setup(desk_config(false), 65);
  Rng rng(11);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const FiberProfile<double> pr =
        k % 2 ? random_profile(s.pb.config(), rng) : fiber_profile(s.pb, random_bump(s.pb.mesh(), rng));
    const double tm = t_m_closed(pr);
    // bisection on k' over a wide bracket
    double lo = tm * 1e-4, hi = tm * 1e4;
    const bool lo_sign = k_prime(pr, lo) > 0.0;
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = hi > 4 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
      ((k_prime(pr, mid) > 0.0) == lo_sign ? lo : hi) = mid;
    }
    worst = std::max(worst, std::abs(0.5 * (lo + hi) - tm) / tm);
  }
  return {worst <= 1e-8, fmt("worst rel err %.3e (tol 1e-8) over 50 profiles", worst)};
}

Outcome gap_structure() {
  const Setup s = setup(desk_config(false), 129);
  const double lam = 0.5 * lambda_dstar(s.in);
  const EtaBounds e = eta_bounds(s.in, lam);
  Rng rng(13);
  int plus_ok = 0, minus_ok = 0;
  double max_plus = 0.0, min_minus = 1e300;
  for (int k = 0; k < 20; ++k) {
    const DiscreteFunction u = random_bump(s.pb.mesh(), rng);
    try {
      const double np = norm_of(s.pb, project(s.pb, u, lam, Branch::Plus));
      max_plus = std::max(max_plus, np);
      if (np < e.eta0) ++plus_ok;
      const double nm = norm_of(s.pb, project(s.pb, u, lam, Branch::Minus));
      min_minus = std::min(min_minus, nm);
      if (nm > e.eta_lambda) ++minus_ok;
    } catch (const Error&) {
    }
  }
  return {e.eta0 < e.eta_lambda && plus_ok == 20 && minus_ok == 20,
          fmt("eta0 %.4g", e.eta0) + fmt(" eta_lambda %.4g", e.eta_lambda) + fmt(", max N+ norm %.4g", max_plus) +
              fmt(", min N- norm %.4g", min_minus) + ", " + std::to_string(plus_ok) + "/20 and " +
              std::to_string(minus_ok) + "/20"};
}

// shared by criteria 6, 8 and 9
struct Runs {
  bool sub_done = false;
  TwoSolutions sub;
  double sub_seconds = 0;
  std::string sub_error;

  bool crit_plus_done = false;
  SolveReport crit_plus;
  bool crit_minus_done = false;
  SolveReport crit_minus;
  std::string crit_minus_error;
  double c_lambda = 0;
  std::string crit_error;
};

Runs& runs() {
  static Runs r;
  return r;
}

void run_subcritical() {
  Runs& r = runs();
  const auto t0 = Clock::now();
  try {
    const Setup s = setup(desk_config(false), 257);
    const double lam = 0.5 * std::min(lambda_star(s.in), lambda_dstar(s.in));
    const DiscreteProblem lp = s.pb.with_lambda(lam);
    SolveOptions opt{lp.config().raw().solver, coercivity_bound(s.in).C - 1.0};
    r.sub = two_solutions(lp, lam, s.in, opt);
    r.sub_done = true;
  } catch (const std::exception& e) {
    r.sub_error = e.what();
  }
  r.sub_seconds = seconds_since(t0);
}

void run_critical() {
  Runs& r = runs();
  try {
    ProblemConfig raw = desk_config(true);
    raw.b = 1e-3;
    const Setup s = setup(raw, 257);
    const double lam = 0.5 * lambda_tstar(s.in);
    const DiscreteProblem lp = s.pb.with_lambda(lam);
    r.c_lambda = c_level(s.in, lam);
    SolveOptions opt{lp.config().raw().solver, coercivity_bound(s.in).C - 1.0};
    r.crit_plus = minimize_branch(lp, lam, Branch::Plus, default_bump(lp.mesh()), opt);
    r.crit_plus_done = true;
    try {
      DiscreteFunction start = default_bump(lp.mesh());
      const ExtremalFamily fam{0.05, default_delta(lp.config().domain()), 0.0};
      if (auto cross = path_crossing(lp, r.crit_plus.solution, cutoff_family(fam, lp.mesh(), lp.config()), lam)) {
        start = *cross;
      }
      r.crit_minus = minimize_branch(lp, lam, Branch::Minus, start, opt);
      r.crit_minus_done = true;
    } catch (const SolveFailure& e) {
      r.crit_minus = e.partial();
      r.crit_minus_error = e.what();
    }
  } catch (const std::exception& e) {
    r.crit_error = e.what();
  }
}

Outcome branch_signs() {
  const Runs& r = runs();
  std::vector<const SolveReport*> reports;
  if (r.sub_done) {
    reports.push_back(&r.sub.plus);
    reports.push_back(&r.sub.minus);
  }
  if (r.crit_plus_done) reports.push_back(&r.crit_plus);
  if (r.crit_minus_done) reports.push_back(&r.crit_minus);
  int ok = 0;
  for (const SolveReport* rep : reports) {
    const bool sign_ok = rep->branch == Branch::Plus ? rep->branch_sign > 0.0 : rep->branch_sign < 0.0;
    const bool energy_ok = rep->branch != Branch::Plus || rep->energy < 0.0;
    if (rep->converged && sign_ok && energy_ok) ++ok;
  }
  const int n = static_cast<int>(reports.size());
  return {n >= 3 && ok == n, std::to_string(ok) + "/" + std::to_string(n) + " converged reports satisfy J<0 (N+) " +
                                 "and the branch sign inequality"};
}

Outcome coercivity() {
  const Setup s = setup(desk_config(false), 129);
  const CoercivityBound cb = coercivity_bound(s.in);
  const double lam = 0.5 * std::min(lambda_star(s.in), lambda_dstar(s.in));
  Rng rng(17);
  double worst = 1e300;
  int samples = 0;
  for (int k = 0; k < 25; ++k) {
    const DiscreteFunction u = random_bump(s.pb.mesh(), rng);
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      worst = std::min(worst, energy(s.pb, project(s.pb, u, lam, b), lam) - (cb.C - 1e-8));
      ++samples;
    }
  }
  // golden section on h over (0, 10 s_m)
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 10.0 * cb.s_m;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo), f1 = cb.h(x1), f2 = cb.h(x2);
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = cb.h(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = cb.h(x1);
    }
  }
  const double sm = 0.5 * (lo + hi);
  const double es = std::abs(sm - cb.s_m) / cb.s_m, ec = std::abs(cb.h(sm) - cb.C) / std::abs(cb.C);
  return {samples == 50 && worst >= 0.0 && es <= 1e-6 && ec <= 1e-6,
          fmt("C %.5g", cb.C) + fmt(", min J - (C - 1e-8) %.4g over 50 samples", worst) +
              fmt(", s_m rel err %.2e", es) + fmt(", C rel err %.2e", ec)};
}

Outcome end_to_end() {
  const Runs& r = runs();
  if (!r.sub_done) return {false, "solve failed: " + r.sub_error};
  const TwoSolutions& t = r.sub;
  const double gap = 0.5 * (t.thresholds.eta_lambda - t.thresholds.eta0);
  const bool ok = t.plus.residual <= 1e-6 && t.minus.residual <= 1e-6 && t.plus.solution.values.minCoeff() >= 0.0 &&
                  t.minus.solution.values.minCoeff() >= 0.0 && t.plus.nehari_class == NehariClass::Plus &&
                  t.minus.nehari_class == NehariClass::Minus && t.separation > gap && r.sub_seconds < 60.0;
  return {ok, fmt("residuals %.2e", t.plus.residual) + fmt("/%.2e", t.minus.residual) +
                  fmt(", separation %.4g", t.separation) + fmt(" > %.4g", gap) + ", classes " +
                  to_string(t.plus.nehari_class) + "/" + to_string(t.minus.nehari_class) +
                  fmt(", N=257 runtime %.2f s (limit 60 s)", r.sub_seconds)};
}

Outcome critical_regime() {
  const Runs& r = runs();
  if (!r.crit_plus_done) return {false, "N+ solve failed: " + r.crit_error};
  const bool plus_ok = r.crit_plus.converged && r.crit_plus.energy < 0.0;
  std::string detail = fmt("N+ J %.5g", r.crit_plus.energy) + fmt(", c_lambda %.5g", r.c_lambda);
  if (!r.crit_minus_done) {
    detail += ", N- descent did not converge (soft-fail: " + r.crit_minus_error + ")";
    return {plus_ok, detail};
  }
  const double margin = r.c_lambda - r.crit_minus.energy;
  detail += fmt(", m- %.5g", r.crit_minus.energy) + fmt(", margin c_lambda - m- %.5g", margin);
  return {plus_ok && margin > 0.0, detail};
}

Outcome extremal_orders() {
  ProblemConfig raw = desk_config(false);
  raw.mesh_nodes = 513;
  const DiscreteProblem pb(validate_config(raw));
  const ValidatedConfig& cfg = pb.config();
  const double delta = default_delta(cfg.domain());
  // four halvings starting at delta / 25
  const std::vector<double> grid{0.01, 0.005, 0.0025, 0.00125};
  const double e_lp = (cfg.n() - cfg.p() * cfg.s()) / (cfg.p() - 1.0), e_def = cfg.n() / (cfg.p() - 1.0);
  const OrderFit lp = epsilon_order_fit(pb, ExtremalQuantity::LpP, grid, delta);
  const OrderFit def = epsilon_order_fit(pb, ExtremalQuantity::LpStarDeficit, grid, delta);
  auto within2 = [](double fitted, double expected) { return fitted >= 0.5 * expected && fitted <= 2.0 * expected; };
  double prev = 1e300;
  bool monotone = true;
  for (double eps : {0.4, 0.2, 0.1}) {
    const double q = rayleigh_quotient(pb, cutoff_family({eps, delta, 0.0}, pb.mesh(), cfg));
    monotone = monotone && q < prev;
    prev = q;
  }
  return {within2(lp.slope, e_lp) && within2(def.slope, e_def) && monotone,
          fmt("lp_p order %.4f", lp.slope) + fmt(" (expected %.4f)", e_lp) + fmt(", p* deficit order %.4f", def.slope) +
              fmt(" (expected %.4f)", e_def) + ", Rayleigh monotone " + (monotone ? "yes" : "no")};
}

std::string exact_digest(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  char buf[64];
  for (const CheckResult& r : results) {
    std::snprintf(buf, sizeof buf, "%a", r.worst_margin);
    os << r.suite << ' ' << r.name << ' ' << r.count << ' ' << r.failures << ' ' << buf << '\n';
  }
  return os.str();
}

Outcome reproducibility() {
  VerifyOptions opt;
  opt.seed = 42;
  std::vector<std::string> tables, digests;
  bool passed = true;
  for (const char* workers : {"1", "1", "2", "8"}) {
    setenv("NK_THREADS", workers, 1);
    const std::vector<CheckResult> res = run_verify(opt);
    tables.push_back(format_table(res));
    digests.push_back(exact_digest(res));
    passed = passed && all_passed(res);
  }
  unsetenv("NK_THREADS");
  bool same = true;
  for (std::size_t k = 1; k < tables.size(); ++k) same = same && tables[k] == tables[0] && digests[k] == digests[0];
  return {same && passed, std::string("tables identical across runs and workers 1,2,8: ") + (same ? "yes" : "no") +
                              ", all suites pass: " + (passed ? "yes" : "no")};
}

}  // namespace

int main() {
  report(1, "quadrature oracle equivalence", quadrature_oracle);
  report(2, "fiber calculus", fiber_calculus);
  report(3, "Nehari root structure at 0.9 lambda*", root_structure);
  report(4, "t_m closed form", t_m_agreement);
  report(5, "norm gap at 0.5 lambda**", gap_structure);
  run_subcritical();
  run_critical();
  report(6, "N+ energy sign and branch inequality", branch_signs);
  report(7, "coercivity bound", coercivity);
  report(8, "subcritical two solutions", end_to_end);
  report(9, "critical regime", critical_regime);
  report(10, "extremal orders", extremal_orders);
  report(11, "reproducibility of verify", reproducibility);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

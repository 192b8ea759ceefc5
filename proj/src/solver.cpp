#include "nk/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "nk/errors.hpp"
#include "nk/extremal.hpp"

namespace nk {

namespace {

struct Terms {
  Eigen::VectorXd kirchhoff, lower, singular, source;
};

Terms residual_terms(const DiscreteProblem& pb, const Eigen::VectorXd& u, double lambda, double floor) {
  const ValidatedConfig& cfg = pb.config();
  const double semi = pb.form().energy(u);
  const double M = cfg.a() + cfg.b() * std::pow(semi, cfg.theta() - 1.0);
  Terms t;
  t.kirchhoff = M * pb.form().gradient(u);
  t.lower = lp_load(pb, u, cfg.p());
  t.singular = singular_load(pb, u, floor);
  t.source = lambda * f_load(pb, u);
  return t;
}

Eigen::VectorXd interior(const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v;
  out[0] = 0.0;
  out[out.size() - 1] = 0.0;
  return out;
}

}  // namespace

Residual weak_residual(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda, double floor) {
  u.require_conforming();
  const int n = pb.mesh().nodes();
  const double alpha = pb.config().alpha();
  if (!(floor > 0.0)) {
    for (int i = 1; i + 1 < n; ++i) {
      if (u.values[i] <= 0.0) {
        throw Error(ErrorKind::SingularEvaluation, "interior node without positive value and no floor");
      }
    }
  }
  const Terms t = residual_terms(pb, u.values, lambda, floor > 0.0 ? floor : 0.0);
  (void)alpha;
  Residual r;
  r.nodal = interior(t.kirchhoff + t.lower - t.singular - t.source);
  const Eigen::VectorXd& hn = pb.form().hat_norms();
  for (int i = 1; i + 1 < n; ++i) {
    const double mag = std::abs(t.kirchhoff[i]) + std::abs(t.lower[i]) + std::abs(t.singular[i]) + std::abs(t.source[i]);
    r.raw = std::max(r.raw, std::abs(r.nodal[i]) / hn[i]);
    r.scale = std::max(r.scale, mag / hn[i]);
  }
  r.scaled = r.scale > 0.0 ? r.raw / r.scale : 0.0;
  return r;
}

double residual_pairing(const DiscreteProblem& pb, const DiscreteFunction& u, const DiscreteFunction& phi,
                        double lambda, double floor) {
  const Residual r = weak_residual(pb, u, lambda, floor);
  return r.nodal.dot(phi.values);
}

double ekeland_schedule(double tol0, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "schedule index starts at 1");
  return tol0 / k;
}

DiscreteFunction default_bump(const Mesh& mesh) {
  const Domain& d = mesh.domain();
  const double mid = 0.5 * (d.lower + d.upper), half = 0.5 * d.measure();
  return DiscreteFunction::sample(mesh, [&](double x) {
    const double r = (x - mid) / half;
    return std::max(0.0, 1.0 - r * r);
  });
}

namespace {

struct Iterate {
  DiscreteFunction u;
  FiberProfile<double> profile;
  double energy = 0;
};

Iterate make_iterate(const DiscreteProblem& pb, const DiscreteFunction& v, double lambda, Branch branch) {
  const FiberProfile<double> pr = fiber_profile(pb, v);
  const double t = projection_factor(pr, lambda, branch);
  Iterate it;
  it.u = t * v;
  it.profile = fiber_profile(pb, it.u);
  it.energy = phi(it.profile, lambda, 1.0);
  return it;
}

class Preconditioner {
 public:
  Preconditioner(const DiscreteProblem& pb, bool full) : full_(full) {
    const Mesh& mesh = pb.mesh();
    const int m = mesh.nodes() - 2;
    Eigen::MatrixXd K;
    if (pb.form().has_matrix()) {
      K = pb.form().matrix().block(1, 1, m, m);
    } else {
      // stiffness of the quadratic form with the same s
      QuadratureScheme scheme = pb.config().raw().quad;
      NonlocalForm quad(mesh, 2.0, pb.config().s(), scheme);
      K = quad.matrix().block(1, 1, m, m);
    }
    if (full_) {
      chol_.compute(K);
    } else {
      diag_ = K.diagonal();
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& g) const {
    if (full_) return chol_.solve(g);
    return g.cwiseQuotient(diag_);
  }

 private:
  bool full_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd diag_;
};

}  // namespace

SolveReport minimize_branch(const DiscreteProblem& pb, double lambda, Branch branch, const DiscreteFunction& init,
                            const SolveOptions& opt) {
  init.require_conforming();
  const SolverSettings& st = opt.settings;
  const ValidatedConfig& cfg = pb.config();
  const int n = pb.mesh().nodes();
  const int m = n - 2;

  SolveReport report;
  report.branch = branch;
  report.lambda = lambda;

  Iterate cur;
  try {
    cur = make_iterate(pb, {pb.mesh(), positive_part(init.values)}, lambda, branch);
  } catch (const Error& e) {
    report.solution = init;
    throw SolveFailure(ErrorKind::ProjectionLost, std::string("initial projection failed: ") + e.what(), report);
  }

  const Preconditioner prec(pb, st.full_preconditioner);
  double floor = st.singular_floor;
  double step = 1.0;
  int k = 0;
  double first_stage_energy = 0.0;
  Residual res;

  for (int stage = 0; stage < 3; ++stage, floor *= 0.5) {
    for (;;) {
      res = weak_residual(pb, cur.u, lambda, floor);
      if (res.scaled <= st.tol_final) break;
      if (k >= st.max_iterations) {
        report.solution = cur.u;
        report.energy = cur.energy;
        report.residual = res.scaled;
        report.iterations = k;
        throw SolveFailure(ErrorKind::Stalled, "iteration budget exhausted", report);
      }
      ++k;
      const double M = cfg.a() + cfg.b() * std::pow(cur.profile.seminorm_p, cfg.theta() - 1.0);
      const Eigen::VectorXd g = res.nodal.segment(1, m);
      const Eigen::VectorXd d = -prec.solve(g) / M;
      const double slope = g.dot(d);

      bool accepted = false;
      step = std::min(1.0, 4.0 * step);
      for (; step >= st.step_min; step *= 0.5) {
        Eigen::VectorXd trial = cur.u.values;
        trial.segment(1, m) += step * d;
        trial = positive_part(trial);
        Iterate next;
        try {
          next = make_iterate(pb, {pb.mesh(), trial}, lambda, branch);
        } catch (const Error&) {
          continue;
        }
        if (opt.energy_floor && next.energy < *opt.energy_floor) continue;
        if (next.energy <= cur.energy + st.armijo * step * slope) {
          cur = std::move(next);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        report.solution = cur.u;
        report.energy = cur.energy;
        report.residual = res.scaled;
        report.iterations = k;
        throw SolveFailure(ErrorKind::Stalled, "line search fell below the minimum step", report);
      }
      report.trace.push_back({k, cur.energy, res.scaled, step, ekeland_schedule(st.tol0, k)});
    }
    if (stage == 0) first_stage_energy = cur.energy;
  }

  const ValidatedConfig& c = cfg;
  const FiberProfile<double>& pr = cur.profile;
  report.solution = cur.u;
  report.energy = cur.energy;
  report.m_value = cur.energy;
  report.residual = res.scaled;
  report.iterations = k;
  report.converged = true;
  report.norm = std::pow(pr.seminorm_p, 1.0 / c.p());
  report.branch_sign = (c.p() + c.alpha() - 1.0) * pr.A + c.b() * (c.p() * c.theta() + c.alpha() - 1.0) * pr.B -
                       lambda * c.q() * (c.q() + c.alpha() - 1.0) * pr.D;
  report.nehari_class = classify_profile(pr, lambda);
  report.floor_sensitivity = std::abs(cur.energy - first_stage_energy);
  return report;
}

std::optional<DiscreteFunction> path_crossing(const DiscreteProblem& pb, const DiscreteFunction& u0,
                                              const DiscreteFunction& v, double lambda) {
  auto t2_of = [&](double r) -> std::optional<double> {
    const DiscreteFunction w{pb.mesh(), u0.values + r * v.values};
    try {
      return projection_factor(fiber_profile(pb, w), lambda, Branch::Minus);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto t0 = t2_of(0.0);
  if (!t0 || !(*t0 > 1.0)) return std::nullopt;
  double lo = 0.0;
  double hi = std::sqrt(gagliardo_p(pb, u0) / std::max(gagliardo_p(pb, v), 1e-300));
  std::optional<double> th;
  for (int i = 0; i < 200; ++i, hi *= 2.0) {
    th = t2_of(hi);
    if (!th) return std::nullopt;
    if (*th < 1.0) break;
    lo = hi;
  }
  if (!th || !(*th < 1.0)) return std::nullopt;
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto tm = t2_of(mid);
    if (!tm) return std::nullopt;
    (*tm > 1.0 ? lo : hi) = mid;
  }
  const DiscreteFunction w{pb.mesh(), u0.values + hi * v.values};
  const auto t = t2_of(hi);
  if (!t) return std::nullopt;
  return *t * w;
}

TwoSolutions two_solutions(const DiscreteProblem& pb, double lambda, const ThresholdInputs& in,
                           const SolveOptions& opt) {
  TwoSolutions out;
  out.thresholds = compute_thresholds(in, lambda);
  const DiscreteFunction bump = default_bump(pb.mesh());
  out.plus = minimize_branch(pb, lambda, Branch::Plus, bump, opt);

  DiscreteFunction start = bump;
  if (pb.config().critical()) {
    const ExtremalFamily fam{0.05, default_delta(pb.config().domain()), 0.0};
    const DiscreteFunction v = cutoff_family(fam, pb.mesh(), pb.config());
    if (auto cross = path_crossing(pb, out.plus.solution, v, lambda)) start = *cross;
  } else {
    const double norm = std::pow(gagliardo_p(pb, bump), 1.0 / pb.config().p());
    start = (2.0 * out.thresholds.eta_lambda / norm) * bump;
  }
  out.minus = minimize_branch(pb, lambda, Branch::Minus, start, opt);

  const DiscreteFunction diff{pb.mesh(), out.plus.solution.values - out.minus.solution.values};
  out.separation = std::pow(gagliardo_p(pb, diff), 1.0 / pb.config().p());
  out.distinct = out.separation > 0.5 * (out.thresholds.eta_lambda - out.thresholds.eta0);
  out.c_margin = out.thresholds.c_level - out.minus.energy;
  return out;
}

double refined_energy(const DiscreteProblem& pb, const SolveReport& report) {
  const DiscreteProblem fine(pb.config(), pb.mesh().refined().nodes());
  const DiscreteFunction u = report.solution.transferred(fine.mesh());
  const DiscreteFunction v = project(fine, u, report.lambda, report.branch);
  return energy(fine, v, report.lambda);
}

}  // namespace nk

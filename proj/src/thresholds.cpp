#include "nk/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "nk/extremal.hpp"

namespace nk {

WeightNorms weight_norms(const DiscreteProblem& pb) {
  WeightNorms n;
  const Eigen::VectorXd c = pb.c_nodes();
  n.sup = c.cwiseAbs().maxCoeff();
  const double q = pb.config().q();
  const double qc = q / (q - 1.0);
  double acc = 0.0;
  for (int k = 0; k < pb.points(); ++k) acc += pb.point_weight()[k] * std::pow(std::abs(pb.point_c()[k]), qc);
  n.conj = std::pow(acc, 1.0 / qc);
  return n;
}

double lambda_star(const ThresholdInputs& in) {
  const ValidatedConfig& c = in.cfg;
  const double p = c.p(), q = c.q(), al = c.alpha(), ps = c.critical_exponent();
  const double S = in.S, om = c.omega_measure();
  const double r = p + al - 1.0;
  return std::pow(om, -(ps - p) * (q + al - 1.0) / (ps * r)) * std::pow(S, q / p) *
         std::pow(in.c.sup * std::pow(S, (1.0 - al) / p), (p - q) / r) *
         std::pow(c.a() * (q - p) / (q + al - 1.0), (q + al - 1.0) / r) * (r / (c.gamma() * q * (q - p)));
}

double lambda_dstar(const ThresholdInputs& in) {
  const ValidatedConfig& c = in.cfg;
  const double p = c.p(), q = c.q(), al = c.alpha(), th = c.theta(), ps = c.critical_exponent();
  const double S = in.S, om = c.omega_measure();
  const double pt = p * th;
  const double den_exp = pt + p + 2.0 * al - 2.0;
  const double e = (2.0 * q - pt - p) / den_exp;
  const double num = std::pow(4.0 * c.a() * c.b() / ((q + al - 1.0) * (q + al - 1.0)), (q + al - 1.0) / den_exp) *
                     std::sqrt((p + al - 1.0) * (pt + al - 1.0)) *
                     std::pow(S, (th + 1.0) * (q + al - 1.0) / den_exp) *
                     std::pow(om, -(q + al - 1.0) * (2.0 * ps - pt - p) / (ps * den_exp));
  const double den = std::pow((q - p) * (q - pt), -0.5 * e) * q * c.gamma() * std::pow(in.c_conj(), e);
  return num / den;
}

EtaBounds eta_bounds(const ThresholdInputs& in, double lambda) {
  const ValidatedConfig& c = in.cfg;
  const double p = c.p(), q = c.q(), al = c.alpha(), th = c.theta(), ps = c.critical_exponent();
  const double S = in.S, om = c.omega_measure(), ab = c.a() * c.b();
  const double pt = p * th;
  EtaBounds eb;
  eb.eta0 = std::pow((q + al - 1.0) * in.c_conj() * std::pow(S, -(1.0 - al) / p) * std::pow(om, (ps + al - 1.0) / ps) /
                         (2.0 * std::sqrt(ab * (q - p) * (q - pt))),
                     2.0 / (pt + p + 2.0 * al - 2.0));
  eb.eta_lambda = std::pow(2.0 * std::sqrt(ab * (p + al - 1.0) * (pt + al - 1.0)) /
                               (lambda * q * (q + al - 1.0) * std::pow(S, -q / p) * std::pow(om, (ps - q) / ps)),
                           2.0 / (2.0 * q - th * p - p));
  return eb;
}

namespace {

// Second term of c_lambda; lambda free.
double c_level_offset(const ThresholdInputs& in) {
  const ValidatedConfig& c = in.cfg;
  const double p = c.p(), al = c.alpha(), th = c.theta(), ps = c.critical_exponent();
  const double pt = p * th;
  const double X = (ps + al - 1.0) / ps * in.c.sup * std::pow(c.omega_measure(), (ps + al - 1.0) / ps) *
                   std::pow(in.S, (al - 1.0) / p);
  return std::pow(X, pt / (pt + al - 1.0)) * std::pow(c.b() * (ps - pt) / (ps * pt), (al - 1.0) / (pt + al - 1.0)) *
         (al / (1.0 - al));
}

}  // namespace

double c_level(const ThresholdInputs& in, double lambda) {
  const ValidatedConfig& c = in.cfg;
  const double n = c.n(), s = c.s(), p = c.p(), ps = c.critical_exponent();
  const double lead = s / n * std::pow(in.S, n / (s * p)) * std::pow(c.a(), n / (s * p)) *
                      std::pow(c.gamma(), -n / (s * ps)) * std::pow(ps * lambda, -n / (s * ps));
  return lead - c_level_offset(in);
}

double lambda_tstar(const ThresholdInputs& in) {
  // value at which the two terms of c_lambda balance
  const ValidatedConfig& c = in.cfg;
  const double n = c.n(), s = c.s(), p = c.p(), ps = c.critical_exponent();
  const double e = s * ps / n;
  return 1.0 / (c.gamma() * ps) * std::pow(s / n, e) * std::pow(c.a() * in.S, ps / p) *
         std::pow(c_level_offset(in), -e);
}

double lambda_qstar(const ThresholdInputs& in, double c3, double c5, double epsilon, double m) {
  const ValidatedConfig& c = in.cfg;
  const double n = c.n(), s = c.s(), p = c.p(), al = c.alpha(), th = c.theta(), ps = c.critical_exponent();
  const double pt = p * th;
  const double X = (ps + al - 1.0) / ps * in.c.sup * std::pow(c.omega_measure(), (ps + al - 1.0) / ps) *
                   std::pow(in.S, (al - 1.0) / p);
  return c3 / c5 * std::pow(epsilon, (n - p * s) / ((p - 1.0) * p)) +
         1.0 / c5 * std::pow(epsilon, -(n - p * s) / p + m * (al - 1.0) / (pt + al - 1.0)) *
             std::pow(X, pt / (pt + al - 1.0)) * std::pow((ps - pt) / (ps * pt), (al - 1.0) / (pt + al - 1.0)) *
             (al / (1.0 - al));
}

double CoercivityBound::h(double s) const { return coeff * std::pow(s, power) - K * s; }

CoercivityBound coercivity_bound(const ThresholdInputs& in) {
  const ValidatedConfig& c = in.cfg;
  const double p = c.p(), al = c.alpha(), th = c.theta(), ps = c.critical_exponent();
  const double pt = p * th;
  const double r = p + al - 1.0;
  const double om_f = std::pow(c.omega_measure(), (ps + al - 1.0) / ps);
  CoercivityBound cb;
  cb.coeff = c.a() * (1.0 / p - 1.0 / pt);
  cb.power = p / (1.0 - al);
  cb.K = in.c_conj() * (1.0 / (1.0 - al) - 1.0 / pt) * om_f * std::pow(in.S, (1.0 - al) / p);
  cb.s_m = std::pow(cb.K / (c.a() * p / (1.0 - al) * (1.0 / p - 1.0 / pt)), (1.0 - al) / r);
  // same factor layout as the minimum of h, every exponent over p + alpha - 1
  cb.C = -std::pow(1.0 / (1.0 - al) - 1.0 / pt, p / r) * std::pow(in.c_conj(), p / r) *
         std::pow(c.omega_measure(), p / ps * (ps + al - 1.0) / r) * std::pow(in.S, (1.0 - al) / r) *
         std::pow(cb.coeff, (al - 1.0) / r) * std::pow((1.0 - al) / p, p / r) * (r / (1.0 - al));
  return cb;
}

namespace {

struct QuotientState {
  double value = 0;
  Eigen::VectorXd u;
};

// Normalizes to unit L^{p*} norm; the quotient is scale free.
QuotientState normalized(const DiscreteProblem& pb, Eigen::VectorXd u) {
  const double pstar = pb.config().critical_exponent();
  u = u.cwiseAbs();
  u[0] = 0.0;
  u[u.size() - 1] = 0.0;
  const DiscreteFunction f(pb.mesh(), u);
  const double norm = std::pow(lp_norm_p(pb, f, pstar), 1.0 / pstar);
  u /= norm;
  return {pb.form().energy(u), u};
}

}  // namespace

SobolevEstimate sobolev_constant(const DiscreteProblem& pb, int max_iterations) {
  const ValidatedConfig& cfg = pb.config();
  const Mesh& mesh = pb.mesh();
  const double delta = default_delta(cfg.domain());
  const double p = cfg.p(), pstar = cfg.critical_exponent();

  SobolevEstimate est;
  est.family_value = std::numeric_limits<double>::infinity();
  DiscreteFunction best;
  for (double eps = 0.4; eps >= 2.0 * mesh.h(); eps *= 0.5) {
    const DiscreteFunction u = cutoff_family({eps, delta, 0.0}, mesh, cfg);
    const double qv = rayleigh_quotient(pb, u);
    if (qv < est.family_value) {
      est.family_value = qv;
      est.family_epsilon = eps;
      best = u;
    }
  }

  const int n = mesh.nodes();
  const int m = n - 2;
  Eigen::LLT<Eigen::MatrixXd> chol;
  if (pb.form().has_matrix()) chol.compute(pb.form().matrix().block(1, 1, m, m));

  QuotientState cur = normalized(pb, best.values);
  double step = 1.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    // grad R = p (G - R L) at unit L^{p*} norm
    const Eigen::VectorXd G = pb.form().gradient(cur.u);
    const Eigen::VectorXd L = lp_load(pb, cur.u, pstar);
    Eigen::VectorXd g = (p * (G - cur.value * L)).segment(1, m);
    Eigen::VectorXd d = pb.form().has_matrix() ? Eigen::VectorXd(-chol.solve(g)) : Eigen::VectorXd(-g);
    if (!pb.form().has_matrix()) d *= cur.u.cwiseAbs().maxCoeff() / std::max(d.cwiseAbs().maxCoeff(), 1e-300);
    const double slope = g.dot(d);
    if (!(slope < 0.0)) break;
    bool accepted = false;
    step = std::min(1.0, 2.0 * step);
    for (; step > 1e-12; step *= 0.5) {
      Eigen::VectorXd trial = cur.u;
      trial.segment(1, m) += step * d;
      QuotientState next = normalized(pb, trial);
      if (next.value <= cur.value + 1e-4 * step * slope) {
        const double gain = cur.value - next.value;
        cur = std::move(next);
        accepted = true;
        if (gain < 1e-13 * cur.value) it = max_iterations;
        break;
      }
    }
    if (!accepted) break;
  }
  est.iterations = std::min(it, max_iterations);
  est.descent_value = cur.value;
  est.minimizer = cur.u;
  est.value = std::min(est.descent_value, est.family_value);
  return est;
}

ThresholdInputs threshold_inputs(const DiscreteProblem& pb, double S) { return {pb.config(), S, weight_norms(pb)}; }

Thresholds compute_thresholds(const ThresholdInputs& in, double lambda) {
  Thresholds t;
  t.lambda = lambda;
  t.S_p = in.S;
  t.lambda_star = lambda_star(in);
  t.lambda_dstar = lambda_dstar(in);
  t.lambda_tstar = lambda_tstar(in);
  const EtaBounds eb = eta_bounds(in, lambda);
  t.eta0 = eb.eta0;
  t.eta_lambda = eb.eta_lambda;
  t.c_level = c_level(in, lambda);
  const CoercivityBound cb = coercivity_bound(in);
  t.coercivity_C = cb.C;
  t.s_m = cb.s_m;
  t.omega_measure = in.cfg.omega_measure();
  t.gamma = in.cfg.gamma();
  return t;
}

Thresholds compute_thresholds(const DiscreteProblem& pb) {
  const SobolevEstimate S = sobolev_constant(pb);
  return compute_thresholds(threshold_inputs(pb, S.value), pb.config().lambda());
}

}  // namespace nk

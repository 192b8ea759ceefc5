#include "nk/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nk/errors.hpp"
#include "nk/parallel.hpp"

namespace nk {

double default_delta(const Domain& domain) { return 0.25 * 0.5 * domain.measure(); }

double u_epsilon(double x, double epsilon, const ValidatedConfig& cfg) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be positive");
  const double e = (cfg.n() - cfg.p() * cfg.s()) / cfg.p();
  const double y = std::abs(x) / epsilon;
  return std::pow(epsilon, -e) * std::pow(1.0 + std::pow(y, cfg.conjugate_exponent()), -e);
}

double cutoff_sigma(double r, double delta) {
  if (r <= 0.5 * delta) return 1.0;
  if (r >= delta) return 0.0;
  const double t = (r - 0.5 * delta) / (0.5 * delta);
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

double truncated_extremal(double x, const ExtremalFamily& fam, const ValidatedConfig& cfg) {
  const double r = std::abs(x - fam.center);
  const double sig = cutoff_sigma(r, fam.delta);
  return sig == 0.0 ? 0.0 : sig * u_epsilon(x - fam.center, fam.epsilon, cfg);
}

DiscreteFunction cutoff_family(const ExtremalFamily& fam, const Mesh& mesh, const ValidatedConfig& cfg) {
  const Domain& d = mesh.domain();
  if (!(fam.delta > 0.0) || fam.center - fam.delta <= d.lower || fam.center + fam.delta >= d.upper) {
    throw Error(ErrorKind::CutoffExceedsDomain, "the cutoff ball must sit inside the domain");
  }
  return DiscreteFunction::sample(mesh, [&](double x) { return truncated_extremal(x, fam, cfg); });
}

double rayleigh_quotient(const DiscreteProblem& pb, const DiscreteFunction& u) {
  const ValidatedConfig& cfg = pb.config();
  const double pstar = cfg.critical_exponent();
  const double num = gagliardo_p(pb, u);
  const double den = std::pow(lp_norm_p(pb, u, pstar), cfg.p() / pstar);
  return num / den;
}

double profile_lp(const DiscreteProblem& pb, const ExtremalFamily& fam, double r) {
  const auto& x = pb.point_x();
  const auto& w = pb.point_weight();
  double acc = 0.0;
  for (int k = 0; k < pb.points(); ++k) {
    const double v = truncated_extremal(x[k], fam, pb.config());
    if (v != 0.0) acc += w[k] * std::pow(v, r);
  }
  return acc;
}

ExtremalSample extremal_sample(const DiscreteProblem& pb, const ExtremalFamily& fam) {
  const DiscreteFunction u = cutoff_family(fam, pb.mesh(), pb.config());
  ExtremalSample s;
  s.epsilon = fam.epsilon;
  s.seminorm = gagliardo_p(pb, u);
  s.lp_p = profile_lp(pb, fam, pb.config().p());
  s.lpstar = profile_lp(pb, fam, pb.config().critical_exponent());
  s.quotient = rayleigh_quotient(pb, u);
  return s;
}

std::vector<ExtremalSample> extremal_sweep(const DiscreteProblem& pb, const std::vector<double>& epsilons,
                                           double delta) {
  std::vector<ExtremalSample> out(epsilons.size());
  for_each_block(static_cast<int>(epsilons.size()), [&](int i) {
    out[i] = extremal_sample(pb, {epsilons[i], delta, 0.0});
  });
  return out;
}

ExtremalQuantity parse_extremal_quantity(const std::string& name) {
  if (name == "seminorm") return ExtremalQuantity::Seminorm;
  if (name == "lp_p") return ExtremalQuantity::LpP;
  if (name == "lpstar") return ExtremalQuantity::LpStarDeficit;
  if (name == "quotient") return ExtremalQuantity::Quotient;
  throw Error(ErrorKind::InvalidParameter, "unknown extremal quantity '" + name + "'");
}

double whole_line_pstar_mass(const ValidatedConfig& cfg) {
  if (cfg.n() != 1) throw Error(ErrorKind::UnsupportedDimension, "closed form is one-dimensional");
  const double pp = cfg.conjugate_exponent();
  return 2.0 * (std::numbers::pi / pp) / std::sin(std::numbers::pi / pp);
}

OrderFit epsilon_order_fit(const DiscreteProblem& pb, ExtremalQuantity quantity,
                           const std::vector<double>& epsilons, double delta) {
  if (epsilons.size() < 4) throw Error(ErrorKind::InsufficientGrid, "need at least four epsilon values");
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) {
      throw Error(ErrorKind::InsufficientGrid, "epsilon grid must be strictly decreasing");
    }
  }
  const auto samples = extremal_sweep(pb, epsilons, delta);
  OrderFit fit;
  fit.epsilons = epsilons;
  for (const auto& s : samples) {
    switch (quantity) {
      case ExtremalQuantity::Seminorm: fit.values.push_back(s.seminorm); break;
      case ExtremalQuantity::LpP: fit.values.push_back(s.lp_p); break;
      case ExtremalQuantity::LpStarDeficit: fit.values.push_back(s.lpstar); break;
      case ExtremalQuantity::Quotient: fit.values.push_back(s.quotient); break;
    }
  }
  const std::size_t m = fit.values.size();
  switch (quantity) {
    case ExtremalQuantity::LpP:
      fit.limit = 0.0;
      break;
    case ExtremalQuantity::LpStarDeficit:
      fit.limit = whole_line_pstar_mass(pb.config());
      break;
    default: {
      const double v1 = fit.values[m - 3], v2 = fit.values[m - 2], v3 = fit.values[m - 1];
      const double den = (v3 - v2) - (v2 - v1);
      fit.limit = den != 0.0 ? v3 - (v3 - v2) * (v3 - v2) / den : v3;
      break;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double gap = std::abs(fit.values[i] - fit.limit);
    if (!(gap > 0.0)) continue;
    const double lx = std::log(epsilons[i]), ly = std::log(gap);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used < 2) throw Error(ErrorKind::InsufficientGrid, "values coincide with the limit");
  fit.slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  return fit;
}

double kirchhoff_split_constant(double theta) { return std::pow(2.0, theta); }

bool kirchhoff_split_holds(double c, double d, double theta) {
  const double C = kirchhoff_split_constant(theta);
  const double lhs = std::pow(c + d, theta);
  const double rhs = std::pow(c, theta) + C * (std::pow(c, theta) + std::pow(d, theta)) +
                     (c > 0.0 ? theta * std::pow(c, theta - 1.0) * d : 0.0);
  return lhs <= rhs * (1.0 + 1e-14);
}

double fit_c7(const DiscreteProblem& pb, const DiscreteFunction& u0, const DiscreteFunction& v,
              const std::vector<double>& r_grid) {
  const ValidatedConfig& cfg = pb.config();
  const double q = cfg.q(), p = cfg.p();
  const Eigen::VectorXd a = pb.at_points(u0.values);
  const Eigen::VectorXd b = pb.at_points(v.values);
  const auto& w = pb.point_w();
  const auto& wt = pb.point_weight();
  double Fv = 0.0, fvu0 = 0.0;
  for (int k = 0; k < pb.points(); ++k) {
    const double bp = std::max(b[k], 0.0), ap = std::max(a[k], 0.0);
    Fv += wt[k] * F_weighted(w[k], q, bp);
    fvu0 += wt[k] * f_weighted(w[k], q, bp) * ap;
  }
  if (!(fvu0 > 0.0)) throw Error(ErrorKind::WrongSignWeight, "int f(v) u0 must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (double r : r_grid) {
    double lhs = 0.0;
    for (int k = 0; k < pb.points(); ++k) {
      const double ap = std::max(a[k], 0.0);
      const double mix = std::max(a[k] + r * b[k], 0.0);
      lhs += wt[k] * (F_weighted(w[k], q, mix) - F_weighted(w[k], q, ap) -
                      2.0 * r / p * f_weighted(w[k], q, ap) * b[k]);
    }
    const double ratio = (lhs - std::pow(r, q) * Fv) / (std::pow(r, q - 1.0) * fvu0);
    best = std::min(best, ratio);
  }
  return best;
}

double TProfile::operator()(double t) const {
  return std::pow(t, p) / p * a_term + b_term * std::pow(t, ptheta) - lambda * std::pow(t, pstar) * F_term -
         lambda * c7 * std::pow(t, pstar - 1.0) * f_term;
}

double TProfile::derivative(double t) const {
  return std::pow(t, p - 1.0) * a_term + ptheta * b_term * std::pow(t, ptheta - 1.0) -
         lambda * pstar * std::pow(t, pstar - 1.0) * F_term -
         lambda * c7 * (pstar - 1.0) * std::pow(t, pstar - 2.0) * f_term;
}

TProfile T_profile(const DiscreteProblem& pb, const DiscreteFunction& v, double lambda, double c7) {
  const ValidatedConfig& cfg = pb.config();
  const double F = F_integral(pb, v);
  if (!(F > 0.0)) throw Error(ErrorKind::WrongSignWeight, "int F(x, u_eps_sigma) must be positive");
  TProfile T;
  const double semi = gagliardo_p(pb, v);
  T.a_term = cfg.a() * semi + lp_norm_p(pb, v, cfg.p());
  T.b_term = cfg.b() * kirchhoff_split_constant(cfg.theta()) * std::pow(semi, cfg.theta());
  T.F_term = F;
  const Eigen::VectorXd at = pb.at_points(v.values);
  double f = 0.0;
  for (int k = 0; k < pb.points(); ++k) {
    f += pb.point_weight()[k] * (at[k] > 0.0 ? f_weighted(pb.point_w()[k], cfg.q(), at[k]) : 0.0);
  }
  T.f_term = f;
  T.c7 = c7;
  T.lambda = lambda;
  T.p = cfg.p();
  T.ptheta = cfg.p() * cfg.theta();
  T.pstar = cfg.critical_exponent();
  return T;
}

TSupremum T_supremum(const TProfile& T) {
  // coarse log grid, widened until T turns negative, then bisection on T'
  double hi = 1.0;
  for (int i = 0; i < 200 && !(T(hi) < 0.0 && T.derivative(hi) < 0.0); ++i) hi *= 2.0;
  const int samples = 400;
  const double lo = hi * 1e-8;
  double best_t = lo, best = T(lo);
  for (int i = 0; i <= samples; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) / samples);
    const double v = T(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  double a = best_t / std::pow(hi / lo, 1.0 / samples), b = best_t * std::pow(hi / lo, 1.0 / samples);
  if (T.derivative(a) > 0.0 && T.derivative(b) < 0.0) {
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
      const double m = 0.5 * (a + b);
      (T.derivative(m) > 0.0 ? a : b) = m;
    }
    best_t = 0.5 * (a + b);
  }
  return {best_t, T(best_t), T.derivative(best_t)};
}

}  // namespace nk

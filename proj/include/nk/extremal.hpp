#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nk/config.hpp"
#include "nk/mesh.hpp"
#include "nk/quadrature.hpp"

namespace nk {

struct ExtremalFamily {
  double epsilon = 0.1;
  double delta = 0.25;
  double center = 0.0;
};

// One quarter of the domain half-width.
double default_delta(const Domain& domain);

// eps^{-(n-ps)/p} (1 + |x/eps|^{p'})^{-(n-ps)/p}
double u_epsilon(double x, double epsilon, const ValidatedConfig& cfg);
// 1 on |x| <= delta/2, 0 on |x| >= delta, cubic smoothstep in between
double cutoff_sigma(double r, double delta);
double truncated_extremal(double x, const ExtremalFamily& fam, const ValidatedConfig& cfg);

DiscreteFunction cutoff_family(const ExtremalFamily& fam, const Mesh& mesh, const ValidatedConfig& cfg);

// ||u||^p / ||u||_{p*}^p
double rayleigh_quotient(const DiscreteProblem& pb, const DiscreteFunction& u);

// Gauss quadrature of |sigma u_eps|^r using the exact profile at the points.
double profile_lp(const DiscreteProblem& pb, const ExtremalFamily& fam, double r);

struct ExtremalSample {
  double epsilon = 0;
  double seminorm = 0;  // ||u||^p of the interpolant
  double lp_p = 0;      // int |sigma u_eps|^p
  double lpstar = 0;    // int |sigma u_eps|^{p*}
  double quotient = 0;  // Rayleigh quotient of the interpolant
};

ExtremalSample extremal_sample(const DiscreteProblem& pb, const ExtremalFamily& fam);
std::vector<ExtremalSample> extremal_sweep(const DiscreteProblem& pb, const std::vector<double>& epsilons,
                                           double delta);

enum class ExtremalQuantity { Seminorm, LpP, LpStarDeficit, Quotient };
ExtremalQuantity parse_extremal_quantity(const std::string& name);

struct OrderFit {
  double slope = 0;
  double limit = 0;
  std::vector<double> epsilons;
  std::vector<double> values;
};

// Slope of log|value - limit| against log eps. The limit is 0 for lp_p, the
// whole-line mass for the p*-deficit, and an Aitken extrapolation from the
// three smallest eps otherwise.
OrderFit epsilon_order_fit(const DiscreteProblem& pb, ExtremalQuantity quantity,
                           const std::vector<double>& epsilons, double delta);

// int over the real line of (1 + |y|^{p'})^{-n}, n = 1
double whole_line_pstar_mass(const ValidatedConfig& cfg);

// (c + d)^theta <= c^theta + C (c^theta + d^theta) + theta c^{theta-1} d with C = 2^theta
double kirchhoff_split_constant(double theta);
bool kirchhoff_split_holds(double c, double d, double theta);

// Constant in F(u0 + r v) - F(u0) - (2r/p) f(u0) v >= r^{p*} F(v) + C7 r^{p*-1} f(v) u0,
// taken as the binding value over the sampled r.
double fit_c7(const DiscreteProblem& pb, const DiscreteFunction& u0, const DiscreteFunction& v,
              const std::vector<double>& r_grid);

struct TProfile {
  double a_term = 0;  // a||v||^p + ||v||_p^p
  double b_term = 0;  // b D_theta ||v||^{p theta}
  double F_term = 0;  // int F(x, v)
  double f_term = 0;  // int f(x, v)
  double c7 = 0;
  double lambda = 0;
  double p = 2, ptheta = 3, pstar = 10;

  double operator()(double t) const;
  double derivative(double t) const;
};

struct TSupremum {
  double t_eps = 0;
  double value = 0;
  double derivative_at_max = 0;
};

TProfile T_profile(const DiscreteProblem& pb, const DiscreteFunction& v, double lambda, double c7);
TSupremum T_supremum(const TProfile& T);

}  // namespace nk

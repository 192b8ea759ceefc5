#include "nk/fiber.hpp"

#include <cmath>

#include "nk/quadrature.hpp"

namespace nk {

const char* to_string(NehariClass c) {
  switch (c) {
    case NehariClass::Plus: return "Plus";
    case NehariClass::Minus: return "Minus";
    case NehariClass::Zero: return "Zero";
    case NehariClass::Off: return "Off";
  }
  return "Off";
}

const char* to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

FiberProfile<double> fiber_profile(const DiscreteProblem& pb, const DiscreteFunction& u) {
  const ValidatedConfig& cfg = pb.config();
  FiberProfile<double> pr;
  pr.ex = FiberExponents<double>::from(cfg);
  pr.seminorm_p = gagliardo_p(pb, u);
  pr.A = cfg.a() * pr.seminorm_p + lp_norm_p(pb, u, cfg.p());
  pr.B = std::pow(pr.seminorm_p, cfg.theta());
  pr.C = singular_integral(pb, u);
  pr.D = F_integral(pb, u);
  return pr;
}

NehariClass classify(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda) {
  return classify_profile(fiber_profile(pb, u), lambda);
}

double projection_factor(const FiberProfile<double>& pr, double lambda, Branch branch) {
  const NehariRoots<double> roots = nehari_roots(pr, lambda);
  if (branch == Branch::Plus) return roots.t1;
  if (!roots.two_roots) {
    throw Error(ErrorKind::NoRootBracket, "no N- point on this ray (int F <= 0)");
  }
  return roots.t2;
}

DiscreteFunction project(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda, Branch branch) {
  const double t = projection_factor(fiber_profile(pb, u), lambda, branch);
  return t * u;
}

double energy(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda) {
  return phi(fiber_profile(pb, u), lambda, 1.0);
}

}  // namespace nk

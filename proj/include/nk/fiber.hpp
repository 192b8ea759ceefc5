#pragma once

#include <cmath>
#include <limits>

#include "nk/config.hpp"
#include "nk/errors.hpp"
#include "nk/mesh.hpp"

namespace nk {

template <class Scalar>
struct FiberExponents {
  Scalar p, theta, alpha, q, b;

  static FiberExponents from(const ValidatedConfig& cfg) {
    return {Scalar(cfg.p()), Scalar(cfg.theta()), Scalar(cfg.alpha()), Scalar(cfg.q()), Scalar(cfg.b())};
  }
};

// A = a||u||^p + ||u||_p^p, B = ||u||^{p theta}, C = int c (u+)^{1-alpha},
// D = int F(x, u+).
template <class Scalar = double>
struct FiberProfile {
  Scalar A = 0, B = 0, C = 0, D = 0;
  Scalar seminorm_p = 0;
  FiberExponents<Scalar> ex{};

  // Profile of t*u.
  FiberProfile scaled(Scalar t) const {
    using std::pow;
    FiberProfile r = *this;
    r.A *= pow(t, ex.p);
    r.B *= pow(t, ex.p * ex.theta);
    r.C *= pow(t, Scalar(1) - ex.alpha);
    r.D *= pow(t, ex.q);
    r.seminorm_p *= pow(t, ex.p);
    return r;
  }

  bool is_zero() const { return A == Scalar(0) && B == Scalar(0) && C == Scalar(0) && D == Scalar(0); }

  // Magnitude used for the manifold tolerance bands.
  Scalar magnitude(Scalar lambda) const {
    using std::abs;
    return A + ex.b * B + C + lambda * ex.q * abs(D);
  }
};

template <class Scalar>
void require_positive_t(Scalar t) {
  if (!(t > Scalar(0))) throw Error(ErrorKind::NonpositiveT, "fiber derivatives need t > 0");
}

template <class Scalar>
Scalar phi(const FiberProfile<Scalar>& pr, Scalar lambda, Scalar t) {
  using std::pow;
  const auto& e = pr.ex;
  const Scalar pt = e.p * e.theta;
  const Scalar one_a = Scalar(1) - e.alpha;
  return pow(t, e.p) / e.p * pr.A + e.b * pow(t, pt) / pt * pr.B - pow(t, one_a) / one_a * pr.C -
         lambda * pow(t, e.q) * pr.D;
}

template <class Scalar>
Scalar phi_prime(const FiberProfile<Scalar>& pr, Scalar lambda, Scalar t) {
  using std::pow;
  require_positive_t(t);
  const auto& e = pr.ex;
  const Scalar pt = e.p * e.theta;
  return pow(t, e.p - 1) * pr.A + e.b * pow(t, pt - 1) * pr.B - pow(t, -e.alpha) * pr.C -
         lambda * e.q * pow(t, e.q - 1) * pr.D;
}

template <class Scalar>
Scalar phi_dprime(const FiberProfile<Scalar>& pr, Scalar lambda, Scalar t) {
  using std::pow;
  require_positive_t(t);
  const auto& e = pr.ex;
  const Scalar pt = e.p * e.theta;
  return (e.p - 1) * pow(t, e.p - 2) * pr.A + e.b * (pt - 1) * pow(t, pt - 2) * pr.B +
         e.alpha * pow(t, -e.alpha - 1) * pr.C - lambda * e.q * (e.q - 1) * pow(t, e.q - 2) * pr.D;
}

// t^{1-q} phi'(t) = psi(t) - lambda q D
template <class Scalar>
Scalar psi(const FiberProfile<Scalar>& pr, Scalar t) {
  using std::pow;
  require_positive_t(t);
  const auto& e = pr.ex;
  return pow(t, e.p - e.q) * pr.A + e.b * pow(t, e.p * e.theta - e.q) * pr.B -
         pow(t, Scalar(1) - e.alpha - e.q) * pr.C;
}

template <class Scalar>
Scalar psi_prime(const FiberProfile<Scalar>& pr, Scalar t) {
  using std::pow;
  require_positive_t(t);
  const auto& e = pr.ex;
  const Scalar pt = e.p * e.theta;
  return (e.p - e.q) * pow(t, e.p - e.q - 1) * pr.A + e.b * (pt - e.q) * pow(t, pt - e.q - 1) * pr.B -
         (Scalar(1) - e.alpha - e.q) * pow(t, -e.alpha - e.q) * pr.C;
}

// psi'(t) = t^{p theta - q - 1} k(t)
template <class Scalar>
Scalar k_fn(const FiberProfile<Scalar>& pr, Scalar t) {
  using std::pow;
  require_positive_t(t);
  const auto& e = pr.ex;
  const Scalar pt = e.p * e.theta;
  return (e.p - e.q) * pow(t, e.p - pt) * pr.A + e.b * (pt - e.q) * pr.B -
         (Scalar(1) - e.alpha - e.q) * pow(t, Scalar(1) - e.alpha - pt) * pr.C;
}

template <class Scalar>
Scalar k_prime(const FiberProfile<Scalar>& pr, Scalar t) {
  using std::pow;
  require_positive_t(t);
  const auto& e = pr.ex;
  const Scalar pt = e.p * e.theta;
  return (e.p - e.q) * (e.p - pt) * pow(t, e.p - pt - 1) * pr.A -
         (Scalar(1) - e.alpha - e.q) * (Scalar(1) - e.alpha - pt) * pow(t, -e.alpha - pt) * pr.C;
}

template <class Scalar>
Scalar t_m_closed(const FiberProfile<Scalar>& pr) {
  using std::pow;
  if (!(pr.A > Scalar(0)) || !(pr.C > Scalar(0))) {
    throw Error(ErrorKind::DegenerateProfile, "t_m needs A > 0 and C > 0");
  }
  const auto& e = pr.ex;
  const Scalar pt = e.p * e.theta;
  const Scalar num = (pt + e.alpha - 1) * (e.q + e.alpha - 1) * pr.C;
  const Scalar den = (pt - e.p) * (e.q - e.p) * pr.A;
  return pow(num / den, Scalar(1) / (e.p + e.alpha - 1));
}

// psi without the Kirchhoff term, and the closed form of its maximum.
template <class Scalar>
Scalar psi_bar(const FiberProfile<Scalar>& pr, Scalar t) {
  using std::pow;
  const auto& e = pr.ex;
  return pow(t, e.p - e.q) * pr.A - pow(t, Scalar(1) - e.alpha - e.q) * pr.C;
}

template <class Scalar>
Scalar psi_bar_max_closed(const FiberProfile<Scalar>& pr) {
  using std::pow;
  const auto& e = pr.ex;
  const Scalar r = e.p + e.alpha - 1;
  const Scalar s = e.q + e.alpha - 1;
  return pow(pr.A, s / r) * pow(pr.C, (e.p - e.q) / r) * pow((e.q - e.p) / s, s / r) * (r / (e.q - e.p));
}

template <class Scalar = double>
struct NehariRoots {
  // t3 of the sign-changing case sits in t1 with two_roots = false
  Scalar t1 = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar t2 = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar t_m = 0;
  Scalar t_max = 0;
  bool two_roots = false;
};

namespace detail {

// Bisection on a sign change of f over (lo, hi); geometric midpoints when the
// bracket spans decades.
template <class Scalar, class F>
Scalar bisect(F&& f, Scalar lo, Scalar hi) {
  using std::sqrt;
  Scalar flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= Scalar(1e-12) * hi) break;
    const Scalar mid = hi > Scalar(4) * lo ? sqrt(lo * hi) : Scalar(0.5) * (lo + hi);
    const Scalar fm = f(mid);
    if (fm == Scalar(0)) return mid;
    if ((fm > Scalar(0)) == (flo > Scalar(0))) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return Scalar(0.5) * (lo + hi);
}

}  // namespace detail

template <class Scalar>
Scalar t_max_numeric(const FiberProfile<Scalar>& pr) {
  const Scalar tm = t_m_closed(pr);
  auto k = [&](Scalar t) { return k_fn(pr, t); };
  Scalar lo = tm * Scalar(1e-6), hi = tm * Scalar(1e6);
  if (!(k(lo) > Scalar(0)) || !(k(hi) < Scalar(0))) {
    throw Error(ErrorKind::DegenerateProfile, "k has no sign change around t_m");
  }
  return detail::bisect(k, lo, hi);
}

template <class Scalar>
NehariRoots<Scalar> nehari_roots(const FiberProfile<Scalar>& pr, Scalar lambda) {
  NehariRoots<Scalar> roots;
  roots.t_m = t_m_closed(pr);
  roots.t_max = t_max_numeric(pr);
  const Scalar level = lambda * pr.ex.q * pr.D;
  auto g = [&](Scalar t) { return psi(pr, t) - level; };
  const Scalar peak = g(roots.t_max);
  if (!(peak > Scalar(0))) {
    throw Error(ErrorKind::NoRootBracket, "psi(t_max) does not exceed lambda q D");
  }

  Scalar lo = roots.t_max;
  for (int i = 0; i < 2000 && !(g(lo) < Scalar(0)); ++i) lo *= Scalar(0.5);
  if (!(g(lo) < Scalar(0))) throw Error(ErrorKind::NoRootBracket, "no lower bracket for t1");
  roots.t1 = detail::bisect(g, lo, roots.t_max);
  if (!(psi_prime(pr, roots.t1) > Scalar(0))) {
    throw Error(ErrorKind::NoRootBracket, "lower root has psi' <= 0");
  }

  if (pr.D > Scalar(0)) {
    Scalar hi = roots.t_max;
    for (int i = 0; i < 2000 && !(g(hi) < Scalar(0)); ++i) hi *= Scalar(2);
    if (!(g(hi) < Scalar(0))) throw Error(ErrorKind::NoRootBracket, "no upper bracket for t2");
    roots.t2 = detail::bisect(g, roots.t_max, hi);
    if (!(psi_prime(pr, roots.t2) < Scalar(0))) {
      throw Error(ErrorKind::NoRootBracket, "upper root has psi' >= 0");
    }
    roots.two_roots = true;
  }
  return roots;
}

enum class NehariClass { Plus, Minus, Zero, Off };
enum class Branch { Plus, Minus };

const char* to_string(NehariClass c);
const char* to_string(Branch b);

template <class Scalar>
NehariClass classify_profile(const FiberProfile<Scalar>& pr, Scalar lambda) {
  using std::abs;
  if (pr.is_zero()) return NehariClass::Zero;
  const Scalar tol = Scalar(1e-9) * pr.magnitude(lambda);
  if (abs(phi_prime(pr, lambda, Scalar(1))) > tol) return NehariClass::Off;
  const Scalar second = phi_dprime(pr, lambda, Scalar(1));
  if (second > tol) return NehariClass::Plus;
  if (second < -tol) return NehariClass::Minus;
  return NehariClass::Zero;
}

class DiscreteProblem;

FiberProfile<double> fiber_profile(const DiscreteProblem& pb, const DiscreteFunction& u);
NehariClass classify(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda);
// t_i u on the requested branch; the t_3 root serves Plus when D <= 0.
DiscreteFunction project(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda, Branch branch);
double projection_factor(const FiberProfile<double>& pr, double lambda, Branch branch);
// J_lambda(u) = phi(1)
double energy(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda);

}  // namespace nk

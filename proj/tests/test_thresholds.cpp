#include <doctest.h>

#include <cmath>

#include "nk/extremal.hpp"
#include "nk/thresholds.hpp"
#include "nk/verify.hpp"

using namespace nk;

namespace {

struct Desk {
  DiscreteProblem pb;
  ThresholdInputs in;
};

Desk make_desk(bool critical, int nodes = 65) {
  ProblemConfig raw = desk_config(critical);
  raw.mesh_nodes = nodes;
  if (critical) raw.b = 1e-3;
  DiscreteProblem pb(validate_config(raw));
  ThresholdInputs in = threshold_inputs(pb, sobolev_constant(pb).value);
  return {pb, in};
}

// Independent evaluation of the lambda* display, grouped factor by factor.
double lambda_star_reference(const ThresholdInputs& in) {
  const ValidatedConfig& c = in.cfg;
  const double p = c.p(), q = c.q(), al = c.alpha(), ps = c.critical_exponent();
  const double r = p + al - 1.0, s = q + al - 1.0;
  const double omega_factor = std::pow(c.omega_measure(), -(ps - p) * s / (ps * r));
  const double sobolev_factor = std::pow(in.S, q / p);
  const double weight_factor = std::pow(in.c.sup, (p - q) / r) * std::pow(in.S, (1.0 - al) * (p - q) / (p * r));
  const double a_factor = std::pow(c.a(), s / r) * std::pow((q - p) / s, s / r);
  const double tail = r / (c.gamma() * q * (q - p));
  return tail * a_factor * weight_factor * sobolev_factor * omega_factor;
}

}  // namespace

TEST_CASE("lambda star agrees with an independent evaluation") {
  for (bool critical : {false, true}) {
    const Desk d = make_desk(critical);
    CHECK(lambda_star(d.in) == doctest::Approx(lambda_star_reference(d.in)).epsilon(1e-14));
  }
}

TEST_CASE("doubling a moves lambda star by its a exponent") {
  const Desk d = make_desk(false);
  ProblemConfig raw = d.in.cfg.raw();
  raw.a = 2.0;
  ThresholdInputs doubled = d.in;
  doubled.cfg = validate_config(raw);
  const double e = (4.0 + 0.5 - 1.0) / (2.0 + 0.5 - 1.0);
  CHECK(lambda_star(doubled) / lambda_star(d.in) == doctest::Approx(std::pow(2.0, e)).epsilon(1e-13));
}

TEST_CASE("eta bounds scale as displayed") {
  const Desk d = make_desk(false);
  const double lam = 0.5 * lambda_dstar(d.in);
  const EtaBounds e = eta_bounds(d.in, lam), half = eta_bounds(d.in, 0.5 * lam), tenth = eta_bounds(d.in, 0.1 * lam);
  CHECK(e.eta0 < e.eta_lambda);
  CHECK(tenth.eta0 == e.eta0);
  const double expo = 2.0 / (2.0 * 4.0 - 3.0 - 2.0);
  CHECK(half.eta_lambda / e.eta_lambda == doctest::Approx(std::pow(2.0, expo)).epsilon(1e-12));
}

TEST_CASE("c_level vanishes at lambda triple star and decreases in lambda") {
  const Desk d = make_desk(true);
  const double top = lambda_tstar(d.in);
  const double lead_scale = c_level(d.in, 0.5 * top) + 1.0;
  CHECK(std::abs(c_level(d.in, top)) <= 1e-10 * lead_scale);
  CHECK(c_level(d.in, 0.25 * top) > c_level(d.in, 0.5 * top));
  CHECK(c_level(d.in, 0.5 * top) > 0.0);
  CHECK(c_level(d.in, 2.0 * top) < 0.0);
}

TEST_CASE("c_level offset carries b to a negative power") {
  // smaller b makes the offset larger, so c_level falls as b decreases
  const Desk d = make_desk(true);
  const double lam = 1e-4;
  double prev = -1e300;
  for (double b : {1e-2, 1e-1, 1.0}) {
    ProblemConfig raw = d.in.cfg.raw();
    raw.b = b;
    ThresholdInputs in = d.in;
    in.cfg = validate_config(raw);
    const double cl = c_level(in, lam);
    CHECK(cl > prev);
    prev = cl;
  }
}

TEST_CASE("coercivity minimum recovered by golden section") {
  for (bool critical : {false, true}) {
    const CoercivityBound cb = coercivity_bound(make_desk(critical).in);
    CHECK(cb.C < 0.0);
    CHECK(cb.h(0.0) == 0.0);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 10.0 * cb.s_m;
    for (int it = 0; it < 300; ++it) {
      const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      if (cb.h(x1) > cb.h(x2)) {
        lo = x1;
      } else {
        hi = x2;
      }
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(cb.s_m).epsilon(1e-6));
    CHECK(cb.h(0.5 * (lo + hi)) == doctest::Approx(cb.C).epsilon(1e-6));
  }
}

TEST_CASE("Sobolev estimate is scale free and bounds sampled quotients") {
  const Desk d = make_desk(false);
  Rng rng(9);
  const DiscreteFunction u = random_bump(d.pb.mesh(), rng);
  CHECK(rayleigh_quotient(d.pb, 7.0 * u) == doctest::Approx(rayleigh_quotient(d.pb, u)).epsilon(1e-12));
  for (int k = 0; k < 100; ++k) {
    const DiscreteFunction v = k % 2 ? random_bump(d.pb.mesh(), rng) : random_signed(d.pb.mesh(), rng);
    CHECK(d.in.S <= rayleigh_quotient(d.pb, v) * (1 + 1e-12));
  }
}

TEST_CASE("harmonized norms switch the q' displays to the sup norm") {
  Desk d = make_desk(false);
  CHECK(d.in.c_conj() == doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-12));
  ProblemConfig raw = d.in.cfg.raw();
  raw.harmonize_norms = true;
  d.in.cfg = validate_config(raw);
  CHECK(d.in.c_conj() == d.in.c.sup);
}

TEST_CASE("thresholds are positive on the desk configs") {
  for (bool critical : {false, true}) {
    const Desk d = make_desk(critical);
    const Thresholds t = compute_thresholds(d.in, 0.5 * std::min(lambda_star(d.in), lambda_dstar(d.in)));
    for (double v : {t.lambda_star, t.lambda_dstar, t.lambda_tstar, t.eta0, t.eta_lambda, t.S_p, t.s_m}) {
      CHECK(v > 0.0);
    }
  }
}

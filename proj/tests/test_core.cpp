#include <doctest.h>

#include <cmath>

#include "nk/config.hpp"
#include "nk/errors.hpp"
#include "nk/mesh.hpp"
#include "nk/nonlinearity.hpp"

using namespace nk;

namespace {

ErrorKind kind_of(const ProblemConfig& raw) {
  try {
    validate_config(raw);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config was accepted");
  return ErrorKind::InvalidParameter;
}

}  // namespace

TEST_CASE("desk configs validate with the expected exponents") {
  const ValidatedConfig sub = validate_config(desk_config(false));
  CHECK(sub.critical_exponent() == doctest::Approx(10.0));
  CHECK(sub.conjugate_exponent() == doctest::Approx(2.0));
  CHECK_FALSE(sub.critical());
  CHECK(sub.gamma() == doctest::Approx(2.0));
  const ValidatedConfig crit = validate_config(desk_config(true));
  CHECK(crit.critical());
  CHECK(crit.q() == doctest::Approx(10.0));
}

TEST_CASE("validation rejects broken parameter chains") {
  ProblemConfig raw = desk_config(false);
  raw.q = 2.5;
  CHECK(kind_of(raw) == ErrorKind::ExponentChainViolated);
  raw = desk_config(false);
  raw.q = 11.0;
  CHECK(kind_of(raw) == ErrorKind::ExponentChainViolated);
  raw = desk_config(false);
  raw.s = 0.6;
  CHECK(kind_of(raw) == ErrorKind::DimensionViolated);
  raw = desk_config(false);
  raw.c_weight = WeightSpec::sign_flip(1.0, 0.0, 1.0);
  CHECK(kind_of(raw) == ErrorKind::NegativeWeight);
  raw = desk_config(false);
  raw.alpha = 1.0;
  CHECK(kind_of(raw) == ErrorKind::InvalidParameter);
  raw = desk_config(false);
  raw.theta = 1.0;
  CHECK(kind_of(raw) == ErrorKind::InvalidParameter);
}

TEST_CASE("validation errors map to exit code 1 and solver errors to 2") {
  CHECK(Error(ErrorKind::ConfigParse, "x").exit_code() == 1);
  CHECK(Error(ErrorKind::ExponentChainViolated, "x").exit_code() == 1);
  CHECK(Error(ErrorKind::Stalled, "x").exit_code() == 2);
  CHECK(Error(ErrorKind::ProjectionLost, "x").exit_code() == 2);
}

TEST_CASE("key value configs parse and reject unknown keys") {
  const KeyValues kv = parse_key_values("# desk\np = 2\nq = 10 # critical\nb=1e-3\ndomain = -2, 2\nw = signflip:1,0,1\n");
  const ProblemConfig raw = config_from_key_values(kv, desk_config(false));
  CHECK(raw.q == 10.0);
  CHECK(raw.b == 1e-3);
  CHECK(raw.domain.lower == -2.0);
  CHECK(raw.domain.upper == 2.0);
  CHECK(raw.w_weight.kind == WeightSpec::Kind::SignFlip);
  CHECK_THROWS_AS(config_from_key_values(parse_key_values("nonsense = 1\n")), Error);
  CHECK_THROWS_AS(config_from_key_values(parse_key_values("p = two\n")), Error);
}

TEST_CASE("weights evaluate their presets") {
  const Domain d{-1.0, 1.0};
  CHECK(WeightSpec::constant(3.0)(0.2, d) == 3.0);
  CHECK(WeightSpec::bump(2.0, 0.0, 1.0)(0.0, d) == doctest::Approx(2.0));
  CHECK(WeightSpec::bump(2.0, 0.0, 1.0)(1.0, d) == doctest::Approx(0.0));
  CHECK(WeightSpec::sign_flip(1.0, 0.0, 1.0)(0.0, d) == doctest::Approx(1.0));
  CHECK(WeightSpec::sign_flip(1.0, 0.0, 1.0)(1.0, d) == doctest::Approx(-1.0));
  CHECK(sup_abs(WeightSpec::sign_flip(1.5, 0.0, 1.0), d) == doctest::Approx(1.5));
}

TEST_CASE("nonlinearity examples") {
  NonlinearitySpec one;
  one.q = 4.0;
  one.w_weight = WeightSpec::constant(1.0);
  CHECK(f_eval(one, 0.0, 0.0) == 0.0);
  CHECK(F_eval(one, 0.0, 0.0) == 0.0);
  CHECK(f_eval(one, 0.0, 2.0) == doctest::Approx(8.0));
  CHECK(F_eval(one, 0.0, 2.0) == doctest::Approx(4.0));
  CHECK(4.0 * F_eval(one, 0.0, 2.0) == doctest::Approx(2.0 * f_eval(one, 0.0, 2.0)));

  NonlinearitySpec neg = one;
  neg.w_weight = WeightSpec::constant(-1.0);
  CHECK(F_eval(neg, 0.0, 3.0) == doctest::Approx(-81.0 / 4.0).epsilon(1e-14));
  // composite Simpson on f from 0 to 3, exact for the cubic
  const int n = 64;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = 3.0 * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f_eval(neg, 0.0, u);
  }
  acc *= 3.0 / n / 3.0;
  CHECK(acc == doctest::Approx(F_eval(neg, 0.0, 3.0)).epsilon(1e-12));
}

TEST_CASE("positive and negative parts") {
  const Mesh mesh({-1.0, 1.0}, 5);
  Eigen::VectorXd v(5);
  v << 0.0, -1.0, 2.0, -3.0, 0.0;
  const DiscreteFunction u(mesh, v);
  const DiscreteFunction up = positive_part(u), um = negative_part(u);
  CHECK(up.values[1] == 0.0);
  CHECK(up.values[2] == 2.0);
  CHECK(um.values[1] == 1.0);
  CHECK(um.values[3] == 3.0);
  CHECK((up.values - um.values - v).norm() == 0.0);
  CHECK(positive_part(DiscreteFunction::zero(mesh)).values.norm() == 0.0);
}

TEST_CASE("discrete functions interpolate and must vanish at the ends") {
  const Mesh mesh({-1.0, 1.0}, 5);
  DiscreteFunction u = DiscreteFunction::sample(mesh, [](double x) { return 1.0 - x * x; });
  CHECK(u.conforming());
  CHECK(u(0.25) == doctest::Approx(0.5 * (u.values[2] + u.values[3])));
  CHECK(u(2.0) == 0.0);
  const DiscreteFunction fine = u.transferred(mesh.refined());
  CHECK(fine.values.size() == 9);
  CHECK(fine.values[4] == doctest::Approx(u.values[2]));
  u.values[0] = 0.1;
  CHECK_THROWS_AS(u.require_conforming(), Error);
}

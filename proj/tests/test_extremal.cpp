#include <doctest.h>

#include <cmath>

#include "nk/errors.hpp"
#include "nk/extremal.hpp"
#include "nk/solver.hpp"

using namespace nk;

namespace {

DiscreteProblem desk(int nodes, bool critical = false) {
  ProblemConfig raw = desk_config(critical);
  raw.mesh_nodes = nodes;
  return DiscreteProblem(validate_config(raw));
}

}  // namespace

TEST_CASE("extremal profile is positive, even and decreasing") {
  const ValidatedConfig cfg = validate_config(desk_config(false));
  for (double eps : {1.0, 0.3, 0.05}) {
    double prev = u_epsilon(0.0, eps, cfg);
    CHECK(prev == doctest::Approx(std::pow(eps, -0.2 / 2.0)));
    for (int i = 1; i <= 50; ++i) {
      const double v = u_epsilon(0.02 * i, eps, cfg);
      CHECK(v > 0.0);
      CHECK(v < prev);
      CHECK(u_epsilon(-0.02 * i, eps, cfg) == v);
      prev = v;
    }
  }
}

TEST_CASE("cutoff has the two plateaus and a smooth ramp") {
  CHECK(cutoff_sigma(0.0, 0.5) == 1.0);
  CHECK(cutoff_sigma(0.25, 0.5) == 1.0);
  CHECK(cutoff_sigma(0.5, 0.5) == 0.0);
  CHECK(cutoff_sigma(0.375, 0.5) == doctest::Approx(0.5));
  CHECK(cutoff_sigma(0.3, 0.5) > cutoff_sigma(0.4, 0.5));
}

TEST_CASE("truncated family equals the profile inside half the cutoff radius") {
  const DiscreteProblem pb = desk(65);
  const ExtremalFamily fam{0.1, default_delta(pb.config().domain()), 0.0};
  CHECK(fam.delta == 0.25);
  const DiscreteFunction u = cutoff_family(fam, pb.mesh(), pb.config());
  for (int i = 0; i < 65; ++i) {
    const double x = pb.mesh().x(i);
    if (std::abs(x) <= 0.5 * fam.delta) CHECK(u.values[i] == u_epsilon(x, 0.1, pb.config()));
    if (std::abs(x) >= fam.delta) CHECK(u.values[i] == 0.0);
  }
  CHECK_THROWS_AS(cutoff_family({0.1, 2.0, 0.0}, pb.mesh(), pb.config()), Error);
}

TEST_CASE("Rayleigh quotient of the family decreases with eps") {
  const DiscreteProblem pb = desk(257);
  const double delta = default_delta(pb.config().domain());
  double prev = 1e300;
  for (double eps : {0.4, 0.2, 0.1}) {
    const double q = rayleigh_quotient(pb, cutoff_family({eps, delta, 0.0}, pb.mesh(), pb.config()));
    CHECK(q < prev);
    prev = q;
  }
}

TEST_CASE("order fit needs a decreasing grid of at least four values") {
  const DiscreteProblem pb = desk(65);
  CHECK_THROWS_AS(epsilon_order_fit(pb, ExtremalQuantity::LpP, {0.4, 0.2, 0.1}, 0.25), Error);
  CHECK_THROWS_AS(epsilon_order_fit(pb, ExtremalQuantity::LpP, {0.1, 0.2, 0.3, 0.4}, 0.25), Error);
  CHECK(parse_extremal_quantity("lp_p") == ExtremalQuantity::LpP);
  CHECK_THROWS_AS(parse_extremal_quantity("nope"), Error);
}

TEST_CASE("whole line p* mass of the extremal profile") {
  // integral of (1 + y^2)^{-1} over the line
  CHECK(whole_line_pstar_mass(validate_config(desk_config(false))) == doctest::Approx(M_PI).epsilon(1e-14));
}

TEST_CASE("Kirchhoff split inequality with C = 2^theta") {
  CHECK(kirchhoff_split_constant(1.5) == doctest::Approx(std::pow(2.0, 1.5)));
  for (double c : {0.0, 0.1, 1.0, 7.0}) {
    for (double d : {0.0, 0.3, 2.0, 50.0}) CHECK(kirchhoff_split_holds(c, d, 1.5));
  }
}

TEST_CASE("T profile needs a positive F term and has an interior maximum") {
  const DiscreteProblem pb = desk(129, true);
  const ExtremalFamily fam{0.05, 0.25, 0.0};
  const DiscreteFunction v = cutoff_family(fam, pb.mesh(), pb.config());
  const DiscreteFunction u0 = 0.3 * default_bump(pb.mesh());
  const double c7 = fit_c7(pb, u0, v, {0.25, 0.5, 1.0, 2.0});
  const TProfile T = T_profile(pb, v, 1e-3, c7);
  const TSupremum sup = T_supremum(T);
  CHECK(sup.t_eps > 0.0);
  CHECK(std::abs(sup.derivative_at_max) <= 1e-6 * std::abs(sup.value) / sup.t_eps);
  CHECK(sup.value >= T(0.5 * sup.t_eps));
  CHECK(sup.value >= T(2.0 * sup.t_eps));
  CHECK_THROWS_AS(T_profile(pb, DiscreteFunction::zero(pb.mesh()), 1e-3, c7), Error);
}

TEST_CASE("lp_p order approaches its series exponent on a fine mesh") {
  const DiscreteProblem pb = desk(513);
  const OrderFit fit = epsilon_order_fit(pb, ExtremalQuantity::LpP, {0.01, 0.005, 0.0025, 0.00125}, 0.25);
  CHECK(fit.slope >= 0.8 * 0.2);
}

TEST_CASE("truncated family seminorm is mesh independent") {
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  const OrderFit coarse = epsilon_order_fit(desk(513), ExtremalQuantity::Seminorm, eps, 0.25);
  const OrderFit fine = epsilon_order_fit(desk(1025), ExtremalQuantity::Seminorm, eps, 0.25);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    CHECK(std::abs(coarse.values[i] - fine.values[i]) <= 1e-3 * fine.values[i]);
  }
}

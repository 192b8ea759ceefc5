#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "nk/errors.hpp"
#include "nk/quadrature.hpp"
#include "nk/solver.hpp"
#include "nk/verify.hpp"

using namespace nk;

namespace {

ValidatedConfig desk(int nodes, double p = 2.0) {
  ProblemConfig raw = desk_config(false);
  raw.mesh_nodes = nodes;
  raw.p = p;
  if (p != 2.0) {
    raw.s = 0.3;
    raw.theta = 1.2;
    raw.q = 3.5;
  }
  return validate_config(raw);
}

}  // namespace

TEST_CASE("gauss rule integrates degree 7 exactly on [0,1]") {
  const GaussRule r = gauss_legendre(4);
  double acc = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    acc += r.weights[i] * std::pow(r.nodes[i], 7);
    mass += r.weights[i];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(acc == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("exterior density matches a numeric tail integral") {
  const Domain d{-1.0, 1.0};
  const double p = 2.0, s = 0.4;
  for (double x : {-0.9, -0.3, 0.0, 0.55}) {
    // integral of r^{-1-ps} over r > dist, with r = dist e^z
    auto tail = [&](double dist) {
      const int n = 200000;
      const double zmax = 200.0, h = zmax / n;
      double acc = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double z = i * h, w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::pow(dist, -p * s) * std::exp(-p * s * z);
      }
      return acc * h;
    };
    CHECK(exterior_density(x, d, p, s) == doctest::Approx(tail(x + 1.0) + tail(1.0 - x)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(exterior_density(1.0, d, p, s), Error);
}

TEST_CASE("nine node profile matches the brute force oracle within one percent") {
  for (bool critical : {false, true}) {
    ProblemConfig raw = desk_config(critical);
    const ValidatedConfig cfg = validate_config(raw);
    const DiscreteProblem pb(cfg, 9);
    const DiscreteFunction u = test_profile_9(cfg.domain());
    const DiscreteFunction v = default_bump(pb.mesh());
    CHECK(gagliardo_p(pb, u) == doctest::Approx(oracle_gagliardo(cfg, u)).epsilon(0.01));
    CHECK(weak_pairing(pb, u, v) == doctest::Approx(oracle_pairing(cfg, u, v)).epsilon(0.01));
    CHECK(lp_norm_p(pb, u, 2.0) == doctest::Approx(oracle_lp(cfg, u, 2.0)).epsilon(0.01));
    CHECK(lp_norm_p(pb, u, 10.0) == doctest::Approx(oracle_lp(cfg, u, 10.0)).epsilon(0.01));
    CHECK(singular_integral(pb, u) == doctest::Approx(oracle_singular(cfg, u)).epsilon(0.01));
    CHECK(F_integral(pb, u) == doctest::Approx(oracle_F(cfg, u)).epsilon(0.01));
  }
}

TEST_CASE("assembled matrix agrees with the direct path at p = 2") {
  DiscreteProblem pb(desk(33));
  REQUIRE(pb.form().has_matrix());
  Rng rng(3);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd u = random_signed(pb.mesh(), rng).values;
    pb.form().use_matrix(true);
    const double em = pb.form().energy(u);
    const Eigen::VectorXd gm = pb.form().gradient(u);
    pb.form().use_matrix(false);
    CHECK(pb.form().energy(u) == doctest::Approx(em).epsilon(1e-10));
    CHECK((pb.form().gradient(u) - gm).norm() <= 1e-10 * gm.norm());
  }
}

TEST_CASE("gradient is the pairing with each hat function") {
  const DiscreteProblem pb(desk(17, 2.5));
  Rng rng(5);
  const DiscreteFunction u = random_bump(pb.mesh(), rng);
  const Eigen::VectorXd g = pb.form().gradient(u.values);
  for (int i : {3, 8, 12}) {
    const DiscreteFunction e(pb.mesh(), Eigen::VectorXd::Unit(17, i));
    CHECK(g[i] == doctest::Approx(weak_pairing(pb, u, e)).epsilon(1e-12));
    // directional derivative of ||u||^p / p
    const double h = 1e-6;
    const double fd = (pb.form().energy(u.values + h * e.values) - pb.form().energy(u.values - h * e.values)) /
                      (2.0 * h * pb.config().p());
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("integrals scale with their homogeneity degrees") {
  const DiscreteProblem pb(desk(33));
  Rng rng(11);
  const DiscreteFunction u = random_bump(pb.mesh(), rng);
  for (double t : {0.5, 2.0, 10.0}) {
    const DiscreteFunction tu = t * u;
    CHECK(gagliardo_p(pb, tu) == doctest::Approx(t * t * gagliardo_p(pb, u)).epsilon(1e-10));
    CHECK(lp_norm_p(pb, tu, 3.0) == doctest::Approx(std::pow(t, 3.0) * lp_norm_p(pb, u, 3.0)).epsilon(1e-10));
    CHECK(singular_integral(pb, tu) == doctest::Approx(std::sqrt(t) * singular_integral(pb, u)).epsilon(1e-10));
    CHECK(F_integral(pb, tu) == doctest::Approx(std::pow(t, 4.0) * F_integral(pb, u)).epsilon(1e-10));
  }
  CHECK(weak_pairing(pb, u, u) == doctest::Approx(gagliardo_p(pb, u)).epsilon(1e-12));
}

TEST_CASE("results are bitwise identical across worker counts") {
  const DiscreteProblem pb2(desk(65, 2.5));
  Rng rng(17);
  const DiscreteFunction u = random_bump(pb2.mesh(), rng);
  std::vector<double> energies;
  std::vector<Eigen::VectorXd> grads;
  for (const char* workers : {"1", "2", "3", "8"}) {
    setenv("NK_THREADS", workers, 1);
    const DiscreteProblem pb(desk(65, 2.5));
    energies.push_back(gagliardo_p(pb, u));
    grads.push_back(pb.form().gradient(u.values));
  }
  unsetenv("NK_THREADS");
  for (std::size_t k = 1; k < energies.size(); ++k) {
    CHECK(energies[k] == energies[0]);
    CHECK((grads[k].array() == grads[0].array()).all());
  }
}

TEST_CASE("hat norms are positive on interior nodes") {
  const DiscreteProblem pb(desk(17, 2.5));
  const Eigen::VectorXd& hn = pb.form().hat_norms();
  for (int i = 1; i < 16; ++i) CHECK(hn[i] > 0.0);
}

TEST_CASE("only one dimensional problems are discretized") {
  ProblemConfig raw = desk_config(false);
  raw.n = 2;
  raw.q = 3.0;
  CHECK_THROWS_AS(DiscreteProblem(validate_config(raw)), Error);
}

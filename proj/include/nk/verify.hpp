#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nk/config.hpp"
#include "nk/fiber.hpp"
#include "nk/mesh.hpp"
#include "nk/quadrature.hpp"

namespace nk {

// Fixed nine-node profile on the domain, non-monotone and zero at the ends.
DiscreteFunction test_profile_9(const Domain& domain);

// Brute-force fine-grid references: midpoint product rule on cells refined
// `factor` times, diagonal subcells skipped, closed-form exterior density.
struct OracleOptions {
  int factor = 10;
};
double oracle_gagliardo(const ValidatedConfig& cfg, const DiscreteFunction& u, OracleOptions opt = {});
double oracle_pairing(const ValidatedConfig& cfg, const DiscreteFunction& u, const DiscreteFunction& v,
                      OracleOptions opt = {});
double oracle_lp(const ValidatedConfig& cfg, const DiscreteFunction& u, double r, OracleOptions opt = {});
double oracle_singular(const ValidatedConfig& cfg, const DiscreteFunction& u, OracleOptions opt = {});
double oracle_F(const ValidatedConfig& cfg, const DiscreteFunction& u, OracleOptions opt = {});

using Rng = std::mt19937_64;

// amp * max(0, 1 - ((x - c)/w)^2)^k with the support kept inside the domain.
DiscreteFunction random_bump(const Mesh& mesh, Rng& rng);
// Bump confined to the part of the domain where w < 0, or nullopt-like zero
// function when w never goes negative.
DiscreteFunction random_negative_bump(const DiscreteProblem& pb, Rng& rng);
FiberProfile<double> random_profile(const ValidatedConfig& cfg, Rng& rng);
DiscreteFunction random_signed(const Mesh& mesh, Rng& rng);
ProblemConfig random_config(Rng& rng);

struct CheckResult {
  std::string suite;
  std::string name;
  int count = 0;
  int failures = 0;
  double worst_margin = 0;  // smallest (allowed - observed); negative on failure

  bool passed() const { return count > 0 && failures == 0; }
};

struct VerifyOptions {
  ProblemConfig base = desk_config(false);
  std::uint64_t seed = 42;
  int mesh = 65;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opt);
// One row per check; no timings so the text is reproducible.
std::string format_table(const std::vector<CheckResult>& results);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace nk

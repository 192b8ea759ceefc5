#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nk/fiber.hpp"
#include "nk/quadrature.hpp"
#include "nk/thresholds.hpp"

namespace nk {

struct TraceEntry {
  int iteration = 0;
  double energy = 0;
  double residual = 0;
  double step = 0;
  double ekeland_tol = 0;
};

struct Residual {
  double raw = 0;     // max_i |R_i| / ||phi_i||
  double scale = 0;   // same with the four terms taken in absolute value
  double scaled = 0;  // raw / scale
  Eigen::VectorXd nodal;
};

// R_i = M(||u||^p) <u, phi_i> + int |u|^{p-2} u phi_i - int c max(u, floor)^{-alpha} phi_i
//       - lambda int f(x, u+) phi_i, with M(t) = a + b t^{theta-1}.
Residual weak_residual(const DiscreteProblem& pb, const DiscreteFunction& u, double lambda, double floor = 1e-8);
// Residual pairing against an arbitrary test function.
double residual_pairing(const DiscreteProblem& pb, const DiscreteFunction& u, const DiscreteFunction& phi,
                        double lambda, double floor = 1e-8);

double ekeland_schedule(double tol0, int k);

struct SolveReport {
  Branch branch = Branch::Plus;
  DiscreteFunction solution;
  double lambda = 0;
  double energy = 0;
  double residual = 0;
  double norm = 0;            // ||u||
  double branch_sign = 0;     // (p+a-1)A + b(p theta+a-1)B - lambda q (q+a-1)D
  NehariClass nehari_class = NehariClass::Off;
  double m_value = 0;
  int iterations = 0;
  bool converged = false;
  double floor_sensitivity = 0;  // energy change over the floor continuation
  std::vector<TraceEntry> trace;
};

struct SolveOptions {
  SolverSettings settings;
  // J may not go below this (coercivity bound minus one); unset disables
  std::optional<double> energy_floor;
};

SolveReport minimize_branch(const DiscreteProblem& pb, double lambda, Branch branch, const DiscreteFunction& init,
                            const SolveOptions& opt);

// Positive bump (1 - r^2) on the domain, r the scaled distance to the midpoint.
DiscreteFunction default_bump(const Mesh& mesh);

// N- starting point on the path u0 + r u_eps_sigma where it crosses N-.
std::optional<DiscreteFunction> path_crossing(const DiscreteProblem& pb, const DiscreteFunction& u0,
                                              const DiscreteFunction& v, double lambda);

struct TwoSolutions {
  SolveReport plus;
  SolveReport minus;
  Thresholds thresholds;
  double separation = 0;  // ||u+ - u-||
  bool distinct = false;
  double c_margin = 0;    // c_lambda - m-, critical case
};

TwoSolutions two_solutions(const DiscreteProblem& pb, double lambda, const ThresholdInputs& in,
                           const SolveOptions& opt);

// Energy after transferring to the doubly refined mesh and re-projecting.
double refined_energy(const DiscreteProblem& pb, const SolveReport& report);

}  // namespace nk

namespace nk {

// Stalled or ProjectionLost, with the last iterate attached.
class SolveFailure : public Error {
 public:
  SolveFailure(ErrorKind kind, const std::string& what, SolveReport partial)
      : Error(kind, what), partial_(std::move(partial)) {}
  const SolveReport& partial() const { return partial_; }

 private:
  SolveReport partial_;
};

}  // namespace nk

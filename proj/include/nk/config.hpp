#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nk {

struct Domain {
  double lower = -1.0;
  double upper = 1.0;

  double measure() const { return upper - lower; }
  bool contains(double x) const { return x > lower && x < upper; }
};

// Coefficient field on the domain. Tables are nodal values on a uniform grid
// spanning the domain and are interpolated linearly.
struct WeightSpec {
  enum class Kind { Constant, Bump, SignFlip, Table };

  Kind kind = Kind::Constant;
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  std::vector<double> table;

  static WeightSpec constant(double value);
  static WeightSpec bump(double amplitude, double center, double width);
  static WeightSpec sign_flip(double amplitude, double center, double width);
  static WeightSpec nodal(std::vector<double> values);

  double operator()(double x, const Domain& domain) const;
  std::string describe() const;
};

enum class DiagonalTreatment { AnalyticLinear, Offset };

struct QuadratureScheme {
  int gauss_points = 4;
  DiagonalTreatment diagonal = DiagonalTreatment::AnalyticLinear;
  bool exterior_correction = true;
};

struct SolverSettings {
  double tol0 = 1e-2;
  double tol_final = 1e-6;
  int max_iterations = 4000;
  double step_min = 1e-14;
  double armijo = 1e-4;
  double singular_floor = 1e-8;
  bool full_preconditioner = false;
};

struct ProblemConfig {
  int n = 1;
  double p = 2.0;
  double s = 0.4;
  double alpha = 0.5;
  double theta = 1.5;
  double a = 1.0;
  double b = 1.0;
  double lambda = 0.0;
  double q = 4.0;
  Domain domain;
  WeightSpec c_weight = WeightSpec::constant(1.0);
  WeightSpec w_weight = WeightSpec::constant(1.0);
  int mesh_nodes = 129;
  QuadratureScheme quad;
  SolverSettings solver;
  bool harmonize_norms = false;
  std::uint64_t seed = 42;
};

class ValidatedConfig {
 public:
  const ProblemConfig& raw() const { return cfg_; }

  int n() const { return cfg_.n; }
  double p() const { return cfg_.p; }
  double s() const { return cfg_.s; }
  double alpha() const { return cfg_.alpha; }
  double theta() const { return cfg_.theta; }
  double a() const { return cfg_.a; }
  double b() const { return cfg_.b; }
  double lambda() const { return cfg_.lambda; }
  double q() const { return cfg_.q; }
  const Domain& domain() const { return cfg_.domain; }

  double critical_exponent() const { return pstar_; }
  double conjugate_exponent() const { return pprime_; }
  double omega_measure() const { return cfg_.domain.measure(); }
  // sup|w| + 1
  double gamma() const { return gamma_; }
  bool critical() const;

  ValidatedConfig with_lambda(double lambda) const;

 private:
  friend ValidatedConfig validate_config(const ProblemConfig&);
  ProblemConfig cfg_;
  double pstar_ = 0.0;
  double pprime_ = 0.0;
  double gamma_ = 1.0;
};

ValidatedConfig validate_config(const ProblemConfig& cfg);

double sup_abs(const WeightSpec& w, const Domain& domain);

// Plain "key = value" text, '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(const std::string& text);
ProblemConfig config_from_key_values(const KeyValues& kv, ProblemConfig base = {});
ProblemConfig load_config(const std::string& path);

// Desk configuration: n=1, Omega=(-1,1), p=2, s=0.4, alpha=0.5, theta=1.5,
// q=4 (or q=10 critical), a=b=1, c=w=1.
ProblemConfig desk_config(bool critical = false);

}  // namespace nk

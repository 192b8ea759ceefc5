#pragma once

#include "nk/config.hpp"
#include "nk/quadrature.hpp"

namespace nk {

struct WeightNorms {
  double sup = 0;   // ||c||_inf over the nodes
  double conj = 0;  // ||c||_{q'}, q' = q/(q-1)
};

WeightNorms weight_norms(const DiscreteProblem& pb);

struct ThresholdInputs {
  ValidatedConfig cfg;
  double S = 0;
  WeightNorms c;

  // ||c|| for the displays written with L^{q'}; the sup norm when harmonized
  double c_conj() const { return cfg.raw().harmonize_norms ? c.sup : c.conj; }
};

double lambda_star(const ThresholdInputs& in);
double lambda_dstar(const ThresholdInputs& in);

struct EtaBounds {
  double eta0 = 0;
  double eta_lambda = 0;
};
EtaBounds eta_bounds(const ThresholdInputs& in, double lambda);

double c_level(const ThresholdInputs& in, double lambda);
double lambda_tstar(const ThresholdInputs& in);
// lambda_{****}(eps) from the fitted expansion constants C''' and C''_5 with b = eps^m.
double lambda_qstar(const ThresholdInputs& in, double c3, double c5, double epsilon, double m);

struct CoercivityBound {
  double C = 0;
  double s_m = 0;
  double K = 0;      // slope of the linear part of h
  double coeff = 0;  // a (1/p - 1/(p theta))
  double power = 0;  // p/(1-alpha)

  double h(double s) const;
};
CoercivityBound coercivity_bound(const ThresholdInputs& in);

struct SobolevEstimate {
  double value = 0;
  double descent_value = 0;
  double family_value = 0;
  double family_epsilon = 0;
  int iterations = 0;
  Eigen::VectorXd minimizer;
};

SobolevEstimate sobolev_constant(const DiscreteProblem& pb, int max_iterations = 300);

struct Thresholds {
  double lambda_star = 0;
  double lambda_dstar = 0;
  double lambda_tstar = 0;
  double eta0 = 0;
  double eta_lambda = 0;
  double c_level = 0;
  double S_p = 0;
  double coercivity_C = 0;
  double s_m = 0;
  double omega_measure = 0;
  double gamma = 0;
  double lambda = 0;
};

ThresholdInputs threshold_inputs(const DiscreteProblem& pb, double S);
Thresholds compute_thresholds(const ThresholdInputs& in, double lambda);
// Sobolev estimate plus every threshold at the configured lambda.
Thresholds compute_thresholds(const DiscreteProblem& pb);

}  // namespace nk

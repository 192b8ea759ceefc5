#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nk/config.hpp"
#include "nk/mesh.hpp"
#include "nk/nonlinearity.hpp"

namespace nk {

// Gauss-Legendre rule on [0,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int points);

// rho(x) = integral of |x-y|^{-1-ps} over y outside (lower, upper).
double exterior_density(double x, const Domain& domain, double p, double s);

// Discrete Gagliardo form ||u||^p on piecewise-linear functions. Cell pairs
// sharing a point are integrated exactly in the distance variable, far pairs
// with a tensor Gauss rule, and the complement through rho.
class NonlocalForm {
 public:
  NonlocalForm(const Mesh& mesh, double p, double s, const QuadratureScheme& scheme);

  double energy(const Eigen::VectorXd& u) const;
  // Entry i is the pairing of u with the hat function of node i.
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  double pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

  // Assembled matrix, available when p == 2.
  bool has_matrix() const { return has_matrix_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  void use_matrix(bool on) { use_matrix_ = on && has_matrix_; }

  double p() const { return p_; }
  // ||phi_i|| for every nodal hat function
  const Eigen::VectorXd& hat_norms() const { return hat_norms_; }

 private:
  double energy_direct(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gradient_direct(const Eigen::VectorXd& u) const;
  void assemble_matrix();
  int pair_blocks() const;

  Mesh mesh_;
  double p_, s_;
  QuadratureScheme scheme_;
  GaussRule rule_;
  int first_far_offset_ = 2;
  // offset k -> g*g weights, already doubled for the (J,I) mirror when k > 0
  std::vector<std::vector<double>> far_;
  double self_weight_ = 0.0;
  std::vector<double> tau_, tau_weight_;
  // per cell and Gauss point, twice rho times the quadrature weight
  std::vector<double> exterior_;
  double boundary_slope_weight_ = 0.0;

  bool has_matrix_ = false;
  bool use_matrix_ = false;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd hat_norms_;
};

class DiscreteProblem {
 public:
  explicit DiscreteProblem(const ValidatedConfig& cfg);
  DiscreteProblem(const ValidatedConfig& cfg, int nodes);

  const ValidatedConfig& config() const { return cfg_; }
  const Mesh& mesh() const { return mesh_; }
  const NonlocalForm& form() const { return form_; }
  NonlocalForm& form() { return form_; }
  const GaussRule& rule() const { return rule_; }
  const NonlinearitySpec& nonlinearity() const { return nonlinearity_; }

  // Gauss points in cell-major order.
  int points() const { return static_cast<int>(point_x_.size()); }
  const std::vector<double>& point_x() const { return point_x_; }
  const std::vector<double>& point_weight() const { return point_weight_; }
  const std::vector<double>& point_c() const { return point_c_; }
  const std::vector<double>& point_w() const { return point_w_; }

  Eigen::VectorXd c_nodes() const;
  Eigen::VectorXd w_nodes() const;

  // Interpolant values at the Gauss points.
  Eigen::VectorXd at_points(const Eigen::VectorXd& u) const;
  // Load vector: entry i integrates values * (hat function i).
  Eigen::VectorXd load(const Eigen::VectorXd& point_values) const;

  DiscreteProblem with_lambda(double lambda) const;

 private:
  ValidatedConfig cfg_;
  Mesh mesh_;
  GaussRule rule_;
  NonlocalForm form_;
  NonlinearitySpec nonlinearity_;
  std::vector<double> point_x_, point_weight_, point_c_, point_w_;
};

double gagliardo_p(const DiscreteProblem& pb, const DiscreteFunction& u);
double weak_pairing(const DiscreteProblem& pb, const DiscreteFunction& u, const DiscreteFunction& v);
double lp_norm_p(const DiscreteProblem& pb, const DiscreteFunction& u, double r);
double singular_integral(const DiscreteProblem& pb, const DiscreteFunction& u);
double F_integral(const DiscreteProblem& pb, const DiscreteFunction& u);

// Nodal derivatives of the integrals above.
Eigen::VectorXd lp_load(const DiscreteProblem& pb, const Eigen::VectorXd& u, double r);
// c * max(u, floor)^{-alpha}
Eigen::VectorXd singular_load(const DiscreteProblem& pb, const Eigen::VectorXd& u, double floor);
Eigen::VectorXd f_load(const DiscreteProblem& pb, const Eigen::VectorXd& u);

}  // namespace nk

#pragma once

#include <Eigen/Dense>

#include "nk/config.hpp"

namespace nk {

// Uniform nodes x_0 = lower, ..., x_{N-1} = upper.
class Mesh {
 public:
  Mesh() = default;
  Mesh(const Domain& domain, int nodes);

  int nodes() const { return nodes_; }
  int cells() const { return nodes_ - 1; }
  double h() const { return h_; }
  double x(int i) const { return domain_.lower + h_ * i; }
  const Domain& domain() const { return domain_; }

  Eigen::VectorXd coordinates() const;
  Mesh refined() const { return Mesh(domain_, 2 * nodes_ - 1); }

 private:
  Domain domain_;
  int nodes_ = 0;
  double h_ = 0.0;
};

// Nodal values with the zero extension outside the domain implied.
struct DiscreteFunction {
  Mesh mesh;
  Eigen::VectorXd values;

  DiscreteFunction() = default;
  DiscreteFunction(const Mesh& m, Eigen::VectorXd v);

  static DiscreteFunction zero(const Mesh& m);

  // Samples f at the nodes and pins both ends to zero.
  template <class F>
  static DiscreteFunction sample(const Mesh& m, F&& f) {
    Eigen::VectorXd v(m.nodes());
    for (int i = 0; i < m.nodes(); ++i) v[i] = f(m.x(i));
    v[0] = 0.0;
    v[m.nodes() - 1] = 0.0;
    return {m, std::move(v)};
  }

  bool conforming() const;
  void require_conforming() const;
  double operator()(double x) const;

  // Piecewise-linear interpolation onto another mesh of the same domain.
  DiscreteFunction transferred(const Mesh& target) const;
};

inline DiscreteFunction operator*(double t, const DiscreteFunction& u) {
  return {u.mesh, t * u.values};
}

template <class Derived>
auto positive_part(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseMax(typename Derived::Scalar(0));
}

template <class Derived>
auto negative_part(const Eigen::MatrixBase<Derived>& v) {
  return (-v).cwiseMax(typename Derived::Scalar(0));
}

DiscreteFunction positive_part(const DiscreteFunction& u);
DiscreteFunction negative_part(const DiscreteFunction& u);

}  // namespace nk

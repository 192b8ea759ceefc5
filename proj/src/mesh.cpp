#include "nk/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "nk/errors.hpp"

namespace nk {

Mesh::Mesh(const Domain& domain, int nodes) : domain_(domain), nodes_(nodes) {
  if (nodes < 3) throw Error(ErrorKind::InvalidParameter, "mesh needs at least 3 nodes");
  h_ = domain.measure() / (nodes - 1);
}

Eigen::VectorXd Mesh::coordinates() const {
  Eigen::VectorXd x(nodes_);
  for (int i = 0; i < nodes_; ++i) x[i] = this->x(i);
  return x;
}

DiscreteFunction::DiscreteFunction(const Mesh& m, Eigen::VectorXd v) : mesh(m), values(std::move(v)) {
  if (values.size() != m.nodes()) {
    throw Error(ErrorKind::InvalidParameter, "value count does not match the mesh");
  }
}

DiscreteFunction DiscreteFunction::zero(const Mesh& m) { return {m, Eigen::VectorXd::Zero(m.nodes())}; }

bool DiscreteFunction::conforming() const {
  return values.size() == mesh.nodes() && values[0] == 0.0 && values[values.size() - 1] == 0.0;
}

void DiscreteFunction::require_conforming() const {
  if (!conforming()) throw Error(ErrorKind::NonconformingFunction, "boundary nodes must carry zero");
}

double DiscreteFunction::operator()(double x) const {
  if (!mesh.domain().contains(x)) return 0.0;
  const double pos = (x - mesh.domain().lower) / mesh.h();
  const int i = std::clamp(static_cast<int>(pos), 0, mesh.cells() - 1);
  const double t = pos - i;
  return (1.0 - t) * values[i] + t * values[i + 1];
}

DiscreteFunction DiscreteFunction::transferred(const Mesh& target) const {
  return sample(target, [this](double x) { return (*this)(x); });
}

DiscreteFunction positive_part(const DiscreteFunction& u) { return {u.mesh, positive_part(u.values)}; }
DiscreteFunction negative_part(const DiscreteFunction& u) { return {u.mesh, negative_part(u.values)}; }

}  // namespace nk

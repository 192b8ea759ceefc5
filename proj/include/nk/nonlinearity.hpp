#pragma once

#include <cmath>

#include "nk/config.hpp"

namespace nk {

// f(x,u) = w(x)|u|^{q-2}u and its primitive F(x,u) = w(x)|u|^q/q.
struct NonlinearitySpec {
  double q = 4.0;
  WeightSpec w_weight;
  Domain domain;
  double gamma = 2.0;

  static NonlinearitySpec from(const ValidatedConfig& cfg) {
    return {cfg.q(), cfg.raw().w_weight, cfg.domain(), cfg.gamma()};
  }

  double weight(double x) const { return w_weight(x, domain); }
};

template <class Scalar>
Scalar f_weighted(Scalar w, Scalar q, Scalar u) {
  using std::abs;
  using std::pow;
  if (u == Scalar(0)) return Scalar(0);
  return w * pow(abs(u), q - Scalar(2)) * u;
}

template <class Scalar>
Scalar F_weighted(Scalar w, Scalar q, Scalar u) {
  using std::abs;
  using std::pow;
  return w * pow(abs(u), q) / q;
}

inline double f_eval(const NonlinearitySpec& spec, double x, double u) {
  return f_weighted(spec.weight(x), spec.q, u);
}

inline double F_eval(const NonlinearitySpec& spec, double x, double u) {
  return F_weighted(spec.weight(x), spec.q, u);
}

}  // namespace nk

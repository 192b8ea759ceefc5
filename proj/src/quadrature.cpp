#include "nk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nk/errors.hpp"
#include "nk/parallel.hpp"

namespace nk {

GaussRule gauss_legendre(int points) {
  if (points < 1) throw Error(ErrorKind::InvalidParameter, "Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // map [-1,1] to [0,1], ascending
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

double exterior_density(double x, const Domain& domain, double p, double s) {
  if (!domain.contains(x)) {
    throw Error(ErrorKind::OnBoundary, "exterior density needs an interior point");
  }
  const double ps = p * s;
  return (std::pow(x - domain.lower, -ps) + std::pow(domain.upper - x, -ps)) / ps;
}

namespace {

inline double abs_pow(double d, double p) {
  if (p == 2.0) return d * d;
  return std::pow(std::abs(d), p);
}

// |d|^{p-2} d
inline double flux(double d, double p) {
  if (p == 2.0) return d;
  if (d == 0.0) return 0.0;
  return std::pow(std::abs(d), p - 2.0) * d;
}

constexpr int kTauPoints = 16;
constexpr int kMaxBlocks = 64;

}  // namespace

NonlocalForm::NonlocalForm(const Mesh& mesh, double p, double s, const QuadratureScheme& scheme)
    : mesh_(mesh), p_(p), s_(s), scheme_(scheme), rule_(gauss_legendre(scheme.gauss_points)) {
  const int cells = mesh_.cells();
  const int g = scheme.gauss_points;
  const double h = mesh_.h();
  const double ps = p * s;
  const double kernel_exp = -1.0 - ps;

  first_far_offset_ = scheme.diagonal == DiagonalTreatment::AnalyticLinear ? 2 : 0;
  far_.assign(cells, {});
  for (int k = first_far_offset_; k < cells; ++k) {
    auto& wk = far_[k];
    wk.assign(g * g, 0.0);
    const double mirror = k > 0 ? 2.0 : 1.0;
    for (int a = 0; a < g; ++a) {
      for (int b = 0; b < g; ++b) {
        const double dist = std::abs((k + rule_.nodes[b] - rule_.nodes[a]) * h);
        if (dist == 0.0) continue;
        wk[a * g + b] = mirror * rule_.weights[a] * rule_.weights[b] * h * h * std::pow(dist, kernel_exp);
      }
    }
  }

  if (scheme.diagonal == DiagonalTreatment::AnalyticLinear) {
    // same cell: |g|^p times the double integral of |x-y|^beta over the cell
    const double beta = p - 1.0 - ps;
    self_weight_ = 2.0 * std::pow(h, beta + 2.0) / ((beta + 1.0) * (beta + 2.0));
    // neighbours: x = z - xi, y = z + eta, then eta = xi*tau on each triangle
    const GaussRule tr = gauss_legendre(kTauPoints);
    const double radial = std::pow(h, p - ps + 1.0) / (p - ps + 1.0);
    tau_ = tr.nodes;
    tau_weight_.resize(kTauPoints);
    for (int k = 0; k < kTauPoints; ++k) {
      tau_weight_[k] = 2.0 * radial * tr.weights[k] * std::pow(1.0 + tau_[k], kernel_exp);
    }
  }

  if (scheme.exterior_correction) {
    exterior_.assign(cells * g, 0.0);
    const Domain& dom = mesh_.domain();
    for (int c = 0; c < cells; ++c) {
      for (int a = 0; a < g; ++a) {
        const double x = mesh_.x(c) + rule_.nodes[a] * h;
        double rho = exterior_density(x, dom, p, s);
        // the near-boundary part of rho on the two end cells is integrated exactly below
        if (c == 0) rho -= std::pow(x - dom.lower, -ps) / ps;
        if (c == cells - 1) rho -= std::pow(dom.upper - x, -ps) / ps;
        exterior_[c * g + a] = 2.0 * rule_.weights[a] * h * rho;
      }
    }
    // |g xi|^p xi^{-ps}/(ps) over (0,h), doubled
    boundary_slope_weight_ = 2.0 * std::pow(h, p - ps + 1.0) / ((p - ps + 1.0) * ps);
  }

  const int n = mesh_.nodes();
  hat_norms_ = Eigen::VectorXd::Zero(n);
  if (p == 2.0) {
    assemble_matrix();
    has_matrix_ = true;
    use_matrix_ = true;
    hat_norms_ = matrix_.diagonal().cwiseSqrt();
  } else {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (int i = 1; i + 1 < n; ++i) {
      e[i] = 1.0;
      hat_norms_[i] = std::pow(energy_direct(e), 1.0 / p);
      e[i] = 0.0;
    }
  }
}

int NonlocalForm::pair_blocks() const { return std::min(kMaxBlocks, mesh_.cells()); }

double NonlocalForm::energy(const Eigen::VectorXd& u) const {
  if (use_matrix_) return u.dot(matrix_ * u);
  return energy_direct(u);
}

Eigen::VectorXd NonlocalForm::gradient(const Eigen::VectorXd& u) const {
  if (use_matrix_) return matrix_ * u;
  return gradient_direct(u);
}

double NonlocalForm::pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return gradient(u).dot(v);
}

double NonlocalForm::energy_direct(const Eigen::VectorXd& u) const {
  const int cells = mesh_.cells();
  const int g = scheme_.gauss_points;
  const double h = mesh_.h();

  std::vector<double> at(cells * g);
  std::vector<double> slope(cells);
  for (int c = 0; c < cells; ++c) {
    slope[c] = (u[c + 1] - u[c]) / h;
    for (int a = 0; a < g; ++a) {
      const double t = rule_.nodes[a];
      at[c * g + a] = (1.0 - t) * u[c] + t * u[c + 1];
    }
  }

  std::vector<double> parts;
  parts.reserve(cells + 1);
  for (int c = 0; c < cells; ++c) {
    double e = 0.0;
    if (scheme_.diagonal == DiagonalTreatment::AnalyticLinear) {
      e += self_weight_ * abs_pow(slope[c], p_);
      if (c + 1 < cells) {
        for (std::size_t k = 0; k < tau_.size(); ++k) {
          e += tau_weight_[k] * (abs_pow(slope[c] + slope[c + 1] * tau_[k], p_) +
                                 abs_pow(slope[c] * tau_[k] + slope[c + 1], p_));
        }
      }
    }
    if (scheme_.exterior_correction) {
      for (int a = 0; a < g; ++a) e += exterior_[c * g + a] * abs_pow(at[c * g + a], p_);
      if (c == 0 || c == cells - 1) e += boundary_slope_weight_ * abs_pow(slope[c], p_);
    }
    parts.push_back(e);
  }
  const double local = pairwise_sum(parts);

  const int blocks = pair_blocks();
  std::vector<double> block_sum(blocks, 0.0);
  for_each_block(blocks, [&](int blk) {
    const int lo = static_cast<int>(static_cast<long>(cells) * blk / blocks);
    const int hi = static_cast<int>(static_cast<long>(cells) * (blk + 1) / blocks);
    double acc = 0.0;
    for (int i = lo; i < hi; ++i) {
      for (int j = i + first_far_offset_; j < cells; ++j) {
        const auto& w = far_[j - i];
        for (int a = 0; a < g; ++a) {
          const double ui = at[i * g + a];
          for (int b = 0; b < g; ++b) acc += w[a * g + b] * abs_pow(ui - at[j * g + b], p_);
        }
      }
    }
    block_sum[blk] = acc;
  });
  return local + pairwise_sum(block_sum);
}

Eigen::VectorXd NonlocalForm::gradient_direct(const Eigen::VectorXd& u) const {
  const int cells = mesh_.cells();
  const int g = scheme_.gauss_points;
  const double h = mesh_.h();
  const int n = mesh_.nodes();

  std::vector<double> at(cells * g);
  std::vector<double> slope(cells);
  for (int c = 0; c < cells; ++c) {
    slope[c] = (u[c + 1] - u[c]) / h;
    for (int a = 0; a < g; ++a) {
      const double t = rule_.nodes[a];
      at[c * g + a] = (1.0 - t) * u[c] + t * u[c + 1];
    }
  }

  // far pairs deposit |d|^{p-2}d weights at Gauss points, one buffer per block
  const int blocks = pair_blocks();
  std::vector<Eigen::VectorXd> block_flux(blocks);
  for_each_block(blocks, [&](int blk) {
    const int lo = static_cast<int>(static_cast<long>(cells) * blk / blocks);
    const int hi = static_cast<int>(static_cast<long>(cells) * (blk + 1) / blocks);
    Eigen::VectorXd fl = Eigen::VectorXd::Zero(cells * g);
    for (int i = lo; i < hi; ++i) {
      for (int j = i + first_far_offset_; j < cells; ++j) {
        const auto& w = far_[j - i];
        for (int a = 0; a < g; ++a) {
          const double ui = at[i * g + a];
          for (int b = 0; b < g; ++b) {
            const double f = w[a * g + b] * flux(ui - at[j * g + b], p_);
            fl[i * g + a] += f;
            fl[j * g + b] -= f;
          }
        }
      }
    }
    block_flux[blk] = std::move(fl);
  });
  Eigen::VectorXd fl = pairwise_sum(block_flux);

  if (scheme_.exterior_correction) {
    for (int k = 0; k < cells * g; ++k) fl[k] += exterior_[k] * flux(at[k], p_);
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < cells; ++c) {
    for (int a = 0; a < g; ++a) {
      const double t = rule_.nodes[a];
      grad[c] += (1.0 - t) * fl[c * g + a];
      grad[c + 1] += t * fl[c * g + a];
    }
  }

  const double inv_h = 1.0 / h;
  for (int c = 0; c < cells; ++c) {
    if (scheme_.diagonal == DiagonalTreatment::AnalyticLinear) {
      const double f = self_weight_ * flux(slope[c], p_);
      grad[c] -= f * inv_h;
      grad[c + 1] += f * inv_h;
      if (c + 1 < cells) {
        for (std::size_t k = 0; k < tau_.size(); ++k) {
          const double t = tau_[k];
          const double f1 = tau_weight_[k] * flux(slope[c] + slope[c + 1] * t, p_);
          const double f2 = tau_weight_[k] * flux(slope[c] * t + slope[c + 1], p_);
          grad[c] += (-f1 - t * f2) * inv_h;
          grad[c + 1] += (f1 * (1.0 - t) + f2 * (t - 1.0)) * inv_h;
          grad[c + 2] += (f1 * t + f2) * inv_h;
        }
      }
    }
    if (scheme_.exterior_correction && (c == 0 || c == cells - 1)) {
      const double f = boundary_slope_weight_ * flux(slope[c], p_);
      grad[c] -= f * inv_h;
      grad[c + 1] += f * inv_h;
    }
  }
  return grad;
}

void NonlocalForm::assemble_matrix() {
  const int cells = mesh_.cells();
  const int g = scheme_.gauss_points;
  const double h = mesh_.h();
  const int n = mesh_.nodes();
  matrix_ = Eigen::MatrixXd::Zero(n, n);
  auto& K = matrix_;

  // far pairs: d = (1-s_a)u_i + s_a u_{i+1} - (1-s_b)u_j - s_b u_{j+1}
  std::vector<Eigen::Matrix4d> local(cells, Eigen::Matrix4d::Zero());
  for (int k = first_far_offset_; k < cells; ++k) {
    Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
    for (int a = 0; a < g; ++a) {
      for (int b = 0; b < g; ++b) {
        const double w = far_[k][a * g + b];
        if (w == 0.0) continue;
        Eigen::Vector4d cf(1.0 - rule_.nodes[a], rule_.nodes[a], -(1.0 - rule_.nodes[b]), -rule_.nodes[b]);
        L += w * cf * cf.transpose();
      }
    }
    local[k] = L;
  }
  for (int i = 0; i < cells; ++i) {
    for (int j = i + first_far_offset_; j < cells; ++j) {
      const Eigen::Matrix4d& L = local[j - i];
      const int idx[4] = {i, i + 1, j, j + 1};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) K(idx[r], idx[c]) += L(r, c);
    }
  }

  const double inv_h2 = 1.0 / (h * h);
  auto add_slope = [&](int c, double w) {
    K(c, c) += w * inv_h2;
    K(c + 1, c + 1) += w * inv_h2;
    K(c, c + 1) -= w * inv_h2;
    K(c + 1, c) -= w * inv_h2;
  };
  for (int c = 0; c < cells; ++c) {
    if (scheme_.diagonal == DiagonalTreatment::AnalyticLinear) {
      add_slope(c, self_weight_);
      if (c + 1 < cells) {
        Eigen::Matrix3d L = Eigen::Matrix3d::Zero();
        for (std::size_t k = 0; k < tau_.size(); ++k) {
          const double t = tau_[k];
          const Eigen::Vector3d c1(-1.0, 1.0 - t, t);
          const Eigen::Vector3d c2(-t, t - 1.0, 1.0);
          L += tau_weight_[k] * inv_h2 * (c1 * c1.transpose() + c2 * c2.transpose());
        }
        K.block<3, 3>(c, c) += L;
      }
    }
    if (scheme_.exterior_correction) {
      for (int a = 0; a < g; ++a) {
        const Eigen::Vector2d phi(1.0 - rule_.nodes[a], rule_.nodes[a]);
        K.block<2, 2>(c, c) += exterior_[c * g + a] * phi * phi.transpose();
      }
      if (c == 0 || c == cells - 1) add_slope(c, boundary_slope_weight_);
    }
  }
}

DiscreteProblem::DiscreteProblem(const ValidatedConfig& cfg) : DiscreteProblem(cfg, cfg.raw().mesh_nodes) {}

namespace {

Mesh checked_mesh(const ValidatedConfig& cfg, int nodes) {
  if (cfg.n() != 1) {
    throw Error(ErrorKind::UnsupportedDimension, "only one-dimensional domains are discretized");
  }
  return Mesh(cfg.domain(), nodes);
}

}  // namespace

DiscreteProblem::DiscreteProblem(const ValidatedConfig& cfg, int nodes)
    : cfg_(cfg),
      mesh_(checked_mesh(cfg, nodes)),
      rule_(gauss_legendre(cfg.raw().quad.gauss_points)),
      form_(mesh_, cfg.p(), cfg.s(), cfg.raw().quad),
      nonlinearity_(NonlinearitySpec::from(cfg)) {
  const int g = static_cast<int>(rule_.nodes.size());
  const int total = mesh_.cells() * g;
  point_x_.resize(total);
  point_weight_.resize(total);
  point_c_.resize(total);
  point_w_.resize(total);
  for (int c = 0; c < mesh_.cells(); ++c) {
    for (int a = 0; a < g; ++a) {
      const int k = c * g + a;
      point_x_[k] = mesh_.x(c) + rule_.nodes[a] * mesh_.h();
      point_weight_[k] = rule_.weights[a] * mesh_.h();
      point_c_[k] = cfg.raw().c_weight(point_x_[k], cfg.domain());
      point_w_[k] = cfg.raw().w_weight(point_x_[k], cfg.domain());
    }
  }
}

DiscreteProblem DiscreteProblem::with_lambda(double lambda) const {
  DiscreteProblem copy = *this;
  copy.cfg_ = cfg_.with_lambda(lambda);
  return copy;
}

Eigen::VectorXd DiscreteProblem::c_nodes() const {
  Eigen::VectorXd v(mesh_.nodes());
  for (int i = 0; i < mesh_.nodes(); ++i) v[i] = cfg_.raw().c_weight(mesh_.x(i), cfg_.domain());
  return v;
}

Eigen::VectorXd DiscreteProblem::w_nodes() const {
  Eigen::VectorXd v(mesh_.nodes());
  for (int i = 0; i < mesh_.nodes(); ++i) v[i] = cfg_.raw().w_weight(mesh_.x(i), cfg_.domain());
  return v;
}

Eigen::VectorXd DiscreteProblem::at_points(const Eigen::VectorXd& u) const {
  const int g = static_cast<int>(rule_.nodes.size());
  Eigen::VectorXd out(points());
  for (int c = 0; c < mesh_.cells(); ++c) {
    for (int a = 0; a < g; ++a) {
      const double t = rule_.nodes[a];
      out[c * g + a] = (1.0 - t) * u[c] + t * u[c + 1];
    }
  }
  return out;
}

Eigen::VectorXd DiscreteProblem::load(const Eigen::VectorXd& point_values) const {
  const int g = static_cast<int>(rule_.nodes.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.nodes());
  for (int c = 0; c < mesh_.cells(); ++c) {
    for (int a = 0; a < g; ++a) {
      const int k = c * g + a;
      const double t = rule_.nodes[a];
      const double v = point_weight_[k] * point_values[k];
      out[c] += (1.0 - t) * v;
      out[c + 1] += t * v;
    }
  }
  return out;
}

double gagliardo_p(const DiscreteProblem& pb, const DiscreteFunction& u) {
  u.require_conforming();
  return pb.form().energy(u.values);
}

double weak_pairing(const DiscreteProblem& pb, const DiscreteFunction& u, const DiscreteFunction& v) {
  u.require_conforming();
  v.require_conforming();
  return pb.form().pairing(u.values, v.values);
}

namespace {

template <class F>
double point_sum(const DiscreteProblem& pb, const Eigen::VectorXd& u, F&& integrand) {
  const Eigen::VectorXd at = pb.at_points(u);
  const auto& w = pb.point_weight();
  double acc = 0.0;
  for (int k = 0; k < pb.points(); ++k) acc += w[k] * integrand(k, at[k]);
  return acc;
}

}  // namespace

double lp_norm_p(const DiscreteProblem& pb, const DiscreteFunction& u, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidParameter, "exponent must be positive");
  return point_sum(pb, u.values, [r](int, double v) { return v == 0.0 ? 0.0 : std::pow(std::abs(v), r); });
}

double singular_integral(const DiscreteProblem& pb, const DiscreteFunction& u) {
  const double e = 1.0 - pb.config().alpha();
  const auto& c = pb.point_c();
  return point_sum(pb, u.values, [&](int k, double v) { return v > 0.0 ? c[k] * std::pow(v, e) : 0.0; });
}

double F_integral(const DiscreteProblem& pb, const DiscreteFunction& u) {
  const double q = pb.config().q();
  const auto& w = pb.point_w();
  return point_sum(pb, u.values, [&](int k, double v) { return v > 0.0 ? F_weighted(w[k], q, v) : 0.0; });
}

Eigen::VectorXd lp_load(const DiscreteProblem& pb, const Eigen::VectorXd& u, double r) {
  Eigen::VectorXd at = pb.at_points(u);
  for (Eigen::Index k = 0; k < at.size(); ++k) at[k] = flux(at[k], r);
  return pb.load(at);
}

Eigen::VectorXd singular_load(const DiscreteProblem& pb, const Eigen::VectorXd& u, double floor) {
  const double alpha = pb.config().alpha();
  Eigen::VectorXd at = pb.at_points(u);
  const auto& c = pb.point_c();
  for (Eigen::Index k = 0; k < at.size(); ++k) at[k] = c[k] * std::pow(std::max(at[k], floor), -alpha);
  return pb.load(at);
}

Eigen::VectorXd f_load(const DiscreteProblem& pb, const Eigen::VectorXd& u) {
  const double q = pb.config().q();
  Eigen::VectorXd at = pb.at_points(u);
  const auto& w = pb.point_w();
  for (Eigen::Index k = 0; k < at.size(); ++k) at[k] = at[k] > 0.0 ? f_weighted(w[k], q, at[k]) : 0.0;
  return pb.load(at);
}

}  // namespace nk

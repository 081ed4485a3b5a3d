#include "bifurc/moments.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

constexpr double kPi = std::numbers::pi;

// |w|^sigma with integer fast paths.
inline double abs_pow_sigma(double a2, double sigma) {  // a2 = |w|^2
  if (sigma == 2.0) return a2;
  if (sigma == 4.0) return a2 * a2;
  if (sigma == 1.0) return std::sqrt(a2);
  if (sigma == 3.0) return a2 * std::sqrt(a2);
  return std::pow(a2, 0.5 * sigma);
}

Eigen::VectorXcd real_matvec(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(m.rows());
  out.real() = m * v.real();
  out.imag() = m * v.imag();
  return out;
}

}  // namespace

cdouble nonlinearity(cdouble w, double sigma) {
  return abs_pow_sigma(std::norm(w), sigma) * w;
}

double nonlinearity_dw(cdouble w, double sigma) {
  return (0.5 * sigma + 1.0) * abs_pow_sigma(std::norm(w), sigma);
}

cdouble nonlinearity_dwbar(cdouble w, double sigma) {
  const double a2 = std::norm(w);
  if (a2 == 0.0) return 0.0;
  return 0.5 * sigma * abs_pow_sigma(a2, sigma) / a2 * (w * w);
}

GroupMomentEvaluator::GroupMomentEvaluator(const EigenGroup& group, const BoxDomain& box,
                                           double sigma, int nodes_per_axis, bool guard)
    : group_(group), box_(box), sigma_(sigma) {
  if (sigma < 1.0) throw ConfigError("GroupMomentEvaluator: sigma must be >= 1");
  const bool pinned = nodes_per_axis > 0;
  nodes_per_axis_ = pinned ? nodes_per_axis : default_nodes_per_axis(box.dim, sigma);
  build(nodes_per_axis_);
  if (sigma_ == 2.0) quartic_ = quartic_tensor(group_, box_);
  if (!guard) return;

  // Two-level guard: moments at n and 2n must agree to 1e-9 relative on probe
  // vectors. Default grids escalate until they do; pinned grids fail hard.
  const int cap = box.dim == 1 ? 8192 : (box.dim == 2 ? 1024 : (box.dim == 3 ? 128 : 32));
  while (true) {
    GroupMomentEvaluator fine(group, box, sigma, 2 * nodes_per_axis_, /*guard=*/false);
    const double worst = probe_difference(fine);
    if (worst <= 1e-9) return;
    if (pinned || 2 * nodes_per_axis_ > cap) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "moment quadrature not converged between grid levels "
                    "(%d vs %d nodes/axis, rel diff %.3e)",
                    nodes_per_axis_, 2 * nodes_per_axis_, worst);
      throw QuadratureError(msg);
    }
    nodes_per_axis_ = fine.nodes_per_axis_;
    basis_.swap(fine.basis_);
    basis_t_.swap(fine.basis_t_);
    basis_w_.swap(fine.basis_w_);
    weights_.swap(fine.weights_);
  }
}

void GroupMomentEvaluator::build(int nodes_per_axis) {
  const QuadratureGrid grid = QuadratureGrid::tensor(box_, nodes_per_axis);
  const int p = group_.multiplicity();
  const long n = grid.points();
  basis_.resize(p, n);
  basis_w_.resize(p, n);
  weights_.resize(n);

  const int dim = box_.dim;
  std::vector<long> stride(dim);
  long acc = 1;
  for (int j = dim - 1; j >= 0; --j) {
    stride[j] = acc;
    acc *= grid.nodes[j].size();
  }
  for (int m = 0; m < p; ++m) {
    std::vector<Eigen::VectorXd> table(dim);
    for (int j = 0; j < dim; ++j) {
      const double L = box_.lengths[j];
      table[j] = (group_.modes[m].k[j] * kPi / L * grid.nodes[j].array()).sin();
    }
    for (long q = 0; q < n; ++q) {
      double v = group_.norm_constant;
      double w = 1.0;
      long rem = q;
      for (int j = 0; j < dim; ++j) {
        const long idx = rem / stride[j];
        rem %= stride[j];
        v *= table[j][idx];
        w *= grid.weights[j][idx];
      }
      basis_(m, q) = v;
      basis_w_(m, q) = v * w;
      weights_[q] = w;
    }
  }
  basis_t_ = basis_.transpose();
}

double GroupMomentEvaluator::probe_difference(const GroupMomentEvaluator& other) const {
  const int p = group_.multiplicity();
  double worst = 0.0;
  for (int probe = 0; probe < 4; ++probe) {
    Eigen::VectorXcd c(p);
    for (int j = 0; j < p; ++j)
      c[j] = cdouble(std::cos(0.7 * (j + 1) + 0.31 * probe),
                     probe == 0 ? 0.0 : std::sin(1.3 * (j + 1) + 0.7 * probe));
    const Eigen::VectorXcd g0 = group_moments(c);
    const Eigen::VectorXcd g1 = other.group_moments(c);
    const double scale = g1.cwiseAbs().maxCoeff() + 1e-30;
    worst = std::max(worst, (g0 - g1).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

Eigen::VectorXcd GroupMomentEvaluator::field(const Eigen::VectorXcd& coeffs) const {
  return real_matvec(basis_t_, coeffs);
}

cdouble GroupMomentEvaluator::moment(const Eigen::VectorXcd& coeffs,
                                     const Eigen::VectorXcd& test) const {
  // sum_m g_m t_m: the test combination enters without conjugation
  return group_moments(coeffs).cwiseProduct(test).sum();
}

Eigen::VectorXcd GroupMomentEvaluator::group_moments(const Eigen::VectorXcd& coeffs) const {
  Eigen::VectorXcd w = field(coeffs);
  for (long q = 0; q < w.size(); ++q) w[q] = nonlinearity(w[q], sigma_);
  return real_matvec(basis_w_, w);
}

void GroupMomentEvaluator::wirtinger_moments(const Eigen::VectorXcd& coeffs, Eigen::MatrixXcd& s1,
                                             Eigen::MatrixXcd& s2, Eigen::VectorXcd& g) const {
  const Eigen::VectorXcd w = field(coeffs);
  const long n = w.size();
  Eigen::VectorXcd fvals(n), fbar(n);
  Eigen::VectorXd fw(n);
  for (long q = 0; q < n; ++q) {
    fvals[q] = nonlinearity(w[q], sigma_);
    fw[q] = nonlinearity_dw(w[q], sigma_);
    fbar[q] = nonlinearity_dwbar(w[q], sigma_);
  }
  g = real_matvec(basis_w_, fvals);
  const int p = basis_size();
  s1.resize(p, p);
  s2.resize(p, p);
  s1.real() = basis_w_ * fw.asDiagonal() * basis_t_;
  s1.imag().setZero();
  s2.real() = basis_w_ * fbar.real().asDiagonal() * basis_t_;
  s2.imag() = basis_w_ * fbar.imag().asDiagonal() * basis_t_;
}

double GroupMomentEvaluator::abs_power_integral(const Eigen::VectorXcd& coeffs,
                                                double power) const {
  const Eigen::VectorXcd w = field(coeffs);
  double s = 0.0;
  for (long q = 0; q < w.size(); ++q) s += weights_[q] * std::pow(std::abs(w[q]), power);
  return s;
}

cdouble GroupMomentEvaluator::moment_closed2(const Eigen::VectorXcd& coeffs,
                                             const Eigen::VectorXcd& test) const {
  return group_moments_closed2(coeffs).cwiseProduct(test).sum();
}

Eigen::VectorXcd GroupMomentEvaluator::group_moments_closed2(const Eigen::VectorXcd& coeffs) const {
  if (!has_closed_form()) throw ConfigError("closed-form moments require sigma == 2");
  const int p = basis_size();
  // |u|^2 u = u^2 ubar: g_m = sum_{j,k,l} c_j c_k conj(c_l) T[j,k,l,m]
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) {
      const cdouble cjk = coeffs[j] * coeffs[k];
      for (int l = 0; l < p; ++l) {
        const cdouble c = cjk * std::conj(coeffs[l]);
        const size_t base = ((static_cast<size_t>(j) * p + k) * p + l) * p;
        for (int m = 0; m < p; ++m) g[m] += c * quartic_[base + m];
      }
    }
  return g;
}

cdouble nonlinear_moment(const Eigen::VectorXcd& coeffs, const Eigen::VectorXcd& test,
                         double sigma, const EigenGroup& group, const BoxDomain& box,
                         int nodes_per_axis) {
  GroupMomentEvaluator eval(group, box, sigma, nodes_per_axis);
  return eval.moment(coeffs, test);
}

double quartic_product_quadrature(const std::array<Mode, 4>& modes, const BoxDomain& box,
                                  int nodes_per_axis, bool normalized) {
  const QuadratureGrid grid = QuadratureGrid::tensor(box, nodes_per_axis);
  const int dim = box.dim;
  // per-axis tables of the weighted 4-product
  std::vector<Eigen::VectorXd> table(dim);
  for (int j = 0; j < dim; ++j) {
    const double L = box.lengths[j];
    Eigen::ArrayXd prod = Eigen::ArrayXd::Ones(grid.nodes[j].size());
    for (const auto& m : modes) prod *= (m.k[j] * kPi / L * grid.nodes[j].array()).sin();
    table[j] = (prod * grid.weights[j].array()).matrix();
  }
  double v = 1.0;
  for (int j = 0; j < dim; ++j) v *= table[j].sum();
  if (normalized) {
    const double c = box.norm_constant();
    v *= c * c * c * c;
  }
  return v;
}

}  // namespace bifurc

#include "bifurc/disk.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bifurc/errors.hpp"
#include "bifurc/moments.hpp"
#include "bifurc/quadrature.hpp"

namespace bifurc {

namespace {
constexpr double kPi = std::numbers::pi;

double bessel_series(int n, double x) {
  // ascending series sum_m (-1)^m (x/2)^{n+2m} / (m! (m+n)!)
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  double sum = term;
  for (int m = 1; m < 80; ++m) {
    term *= -half * half / (m * (m + n));
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-18)) break;
  }
  return sum;
}

double bessel_miller(int n, double x) {
  // backward recurrence, normalized by J_0 + 2 J_2 + 2 J_4 + ... = 1
  const int start = n + static_cast<int>(1.5 * x) + 36;
  double jp = 0.0, jc = 1e-30;
  double norm = 0.0, result = 0.0;
  for (int k = start; k >= 0; --k) {
    const double jm = (2.0 * (k + 1) / x) * jc - jp;
    jp = jc;
    jc = jm;
    if (k == n) result = jc;
    if (k % 2 == 0) norm += (k == 0 ? 1.0 : 2.0) * jc;
    if (std::abs(jc) > 1e280) {  // rescale to avoid overflow
      jp /= 1e280;
      jc /= 1e280;
      norm /= 1e280;
      result /= 1e280;
    }
  }
  return result / norm;
}

}  // namespace

double bessel_j(int order, double x) {
  if (order < 0) throw ConfigError("bessel_j: order must be >= 0");
  if (x < 0) throw ConfigError("bessel_j: x must be >= 0");
  if (x == 0) return order == 0 ? 1.0 : 0.0;
  return x <= 8.0 ? bessel_series(order, x) : bessel_miller(order, x);
}

double bessel_j1_zero(int n) {
  if (n < 1) throw ConfigError("bessel_j1_zero: n must be >= 1");
  // scan for the n-th sign change of J_1 past 0, then Newton with
  // J_1' = J_0 - J_1/x
  int found = 0;
  double a = 0.5, b = 0.0;
  double fa = bessel_j(1, a);
  for (double x = 1.0; x < 500.0; x += 0.5) {
    const double fx = bessel_j(1, x);
    if (fa * fx < 0) {
      if (++found == n) {
        b = x;
        break;
      }
    }
    a = x;
    fa = fx;
  }
  if (b == 0.0) throw SolverError("bessel_j1_zero: zero not bracketed");
  double x = 0.5 * (a + b);
  for (int it = 0; it < 60; ++it) {
    const double f = bessel_j(1, x);
    const double df = bessel_j(0, x) - f / x;
    const double step = f / df;
    x -= step;
    if (std::abs(step) < 1e-15 * x) break;
  }
  return x;
}

DiskSecondEigenpair::DiskSecondEigenpair(int radial_nodes, int angular_nodes)
    : radial_nodes_(radial_nodes), angular_nodes_(angular_nodes) {
  if (radial_nodes < 8 || angular_nodes < 16)
    throw ConfigError("DiskSecondEigenpair: quadrature too coarse");
  j11_ = bessel_j1_zero(1);

  const QuadratureRule rule = gauss_legendre(radial_nodes_);
  radial_.resize(radial_nodes_);
  radial_weight_.resize(radial_nodes_);
  for (int i = 0; i < radial_nodes_; ++i) {
    const double r = 0.5 * (rule.nodes[i] + 1.0);
    radial_[i] = bessel_j(1, j11_ * r);
    radial_weight_[i] = 0.5 * rule.weights[i] * r;
  }
  angles_.resize(angular_nodes_);
  for (int k = 0; k < angular_nodes_; ++k) angles_[k] = 2 * kPi * k / angular_nodes_;

  // normalize: c^2 * (int J^2 r dr) * (int cos^2) = 1
  const double radial_i2 = (radial_.array().square() * radial_weight_.array()).sum();
  c_ = 1.0 / std::sqrt(radial_i2 * kPi);
}

cdouble DiskSecondEigenpair::eval_P2(cdouble alpha, double sigma, double frame) const {
  const double dtheta = 2 * kPi / angular_nodes_;
  cdouble acc(0, 0);
  for (int k = 0; k < angular_nodes_; ++k) {
    const double t = angles_[k] + frame;
    const double ct = std::cos(t), st = std::sin(t);
    // angular factors of u_A and of the test combination alpha u1 - u2
    const cdouble f = ct + alpha * st;
    const cdouble test = alpha * ct - st;
    cdouble radial_sum(0, 0);
    for (int i = 0; i < radial_nodes_; ++i) {
      const double rho = c_ * radial_[i];
      const cdouble w = rho * f;
      radial_sum += radial_weight_[i] * nonlinearity(w, sigma) * (rho * test);
    }
    acc += dtheta * radial_sum;
  }
  return acc;
}

Eigen::Matrix2d DiskSecondEigenpair::real_jacobian_fd(cdouble alpha, double h) const {
  Eigen::Matrix2d jac;
  const cdouble dre = eval_P2(alpha + h) - eval_P2(alpha - h);
  const cdouble dim = eval_P2(alpha + cdouble(0, h)) - eval_P2(alpha - cdouble(0, h));
  jac(0, 0) = dre.real() / (2 * h);
  jac(1, 0) = dre.imag() / (2 * h);
  jac(0, 1) = dim.real() / (2 * h);
  jac(1, 1) = dim.imag() / (2 * h);
  return jac;
}

DiskSecondEigenpair::StructuralFit DiskSecondEigenpair::fit_structural_form(
    int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  auto shape = [](cdouble a) {
    return (a * a - std::norm(a)) * a + cdouble(0, 2) * a.imag();
  };
  cdouble num(0, 0);
  double den = 0;
  std::vector<std::pair<cdouble, cdouble>> probes;
  for (int s = 0; s < samples; ++s) {
    const cdouble a(uni(rng), uni(rng));
    const cdouble p = eval_P2(a);
    const cdouble sv = shape(a);
    probes.emplace_back(p, sv);
    num += std::conj(sv) * p;
    den += std::norm(sv);
  }
  StructuralFit fit;
  fit.C = num / den;
  for (const auto& [p, sv] : probes)
    fit.max_rel_residual =
        std::max(fit.max_rel_residual, std::abs(p - fit.C * sv) / std::abs(fit.C));
  return fit;
}

Eigen::VectorXcd DiskReducedSystem::eval(const Eigen::VectorXcd& alpha) const {
  Eigen::VectorXcd out(1);
  out[0] = pair_->eval_P2(alpha[0], sigma_);
  return out;
}

Eigen::MatrixXd DiskReducedSystem::real_jacobian(const Eigen::VectorXcd& alpha) const {
  return pair_->real_jacobian_fd(alpha[0]);
}

ContinuumReport detect_continuum(const DiskSecondEigenpair& pair) {
  ContinuumReport report;
  for (int i = 0; i <= 100; ++i) {
    const double a = -2.0 + 4.0 * i / 100.0;
    report.max_real_abs_P = std::max(report.max_real_abs_P, std::abs(pair.eval_P2(a)));
  }

  Eigen::Matrix2d jac = pair.real_jacobian_fd(cdouble(0.5, 0.0));
  const double scale = std::max(jac.row(0).norm(), jac.row(1).norm());
  if (scale > 1e-300) jac /= scale;
  report.jacobian_det_sample = jac.determinant();

  const auto fit = pair.fit_structural_form();
  report.C = fit.C;
  report.max_structural_residual = fit.max_rel_residual;

  report.continuum_detected = report.max_real_abs_P < 1e-10 &&
                              std::abs(report.jacobian_det_sample) < 1e-8 &&
                              report.max_structural_residual < 1e-6;
  return report;
}

}  // namespace bifurc

// Nonlinear coupling moments of |u|^sigma u over an eigengroup: tensor
// Gauss-Legendre quadrature with a two-level resolution guard, plus the
// independent sigma=2 closed form through the quartic tensor.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bifurc/box.hpp"
#include "bifurc/quadrature.hpp"
#include "bifurc/sine_integrals.hpp"

namespace bifurc {

using cdouble = std::complex<double>;

/// Pointwise nonlinearity f(w) = |w|^sigma w and its Wirtinger derivatives
/// d f / d w = (sigma/2 + 1)|w|^sigma, d f / d wbar = (sigma/2)|w|^(sigma-2) w^2.
cdouble nonlinearity(cdouble w, double sigma);
double nonlinearity_dw(cdouble w, double sigma);       // real
cdouble nonlinearity_dwbar(cdouble w, double sigma);

/// Quadrature engine for moments over the span of one eigengroup. Construction
/// samples the basis on a tensor Gauss-Legendre grid; with guard enabled the
/// moments are cross-checked against a doubled grid on probe vectors and a
/// QuadratureError is thrown if the two levels disagree beyond 1e-9 relative.
class GroupMomentEvaluator {
public:
  GroupMomentEvaluator(const EigenGroup& group, const BoxDomain& box, double sigma,
                       int nodes_per_axis = 0, bool guard = true);

  const EigenGroup& group() const { return group_; }
  const BoxDomain& box() const { return box_; }
  double sigma() const { return sigma_; }
  int basis_size() const { return static_cast<int>(basis_.rows()); }
  int nodes_per_axis() const { return nodes_per_axis_; }

  /// integral |u_c|^sigma u_c u_t dx with u_c = sum c_j u_j, u_t = sum t_j u_j
  /// (no conjugation on the test combination).
  cdouble moment(const Eigen::VectorXcd& coeffs, const Eigen::VectorXcd& test) const;

  /// g_m = integral |u_c|^sigma u_c u_m dx for every basis function.
  Eigen::VectorXcd group_moments(const Eigen::VectorXcd& coeffs) const;

  /// Wirtinger moment matrices S1(a,b) = integral f_w u_a u_b,
  /// S2(a,b) = integral f_wbar u_a u_b, together with g as above.
  void wirtinger_moments(const Eigen::VectorXcd& coeffs, Eigen::MatrixXcd& s1,
                         Eigen::MatrixXcd& s2, Eigen::VectorXcd& g) const;

  /// integral |u_c|^power dx (used by the branch-limit rate check).
  double abs_power_integral(const Eigen::VectorXcd& coeffs, double power) const;

  /// sigma = 2 closed form of the same moments via the quartic tensor;
  /// independent of the quadrature path.
  bool has_closed_form() const { return sigma_ == 2.0; }
  cdouble moment_closed2(const Eigen::VectorXcd& coeffs, const Eigen::VectorXcd& test) const;
  Eigen::VectorXcd group_moments_closed2(const Eigen::VectorXcd& coeffs) const;

private:
  void build(int nodes_per_axis);
  double probe_difference(const GroupMomentEvaluator& other) const;
  Eigen::VectorXcd field(const Eigen::VectorXcd& coeffs) const;

  EigenGroup group_;
  BoxDomain box_;
  double sigma_;
  int nodes_per_axis_;
  Eigen::MatrixXd basis_;    // p x n basis values
  Eigen::MatrixXd basis_t_;  // n x p, the transpose kept for the hot paths
  Eigen::MatrixXd basis_w_;  // p x n basis values times tensor weights
  Eigen::VectorXd weights_;  // tensor weights
  std::vector<double> quartic_;  // p^4 tensor, filled when sigma == 2
};

/// Free-function form matching the per-operation contract.
cdouble nonlinear_moment(const Eigen::VectorXcd& coeffs, const Eigen::VectorXcd& test,
                         double sigma, const EigenGroup& group, const BoxDomain& box,
                         int nodes_per_axis = 0);

/// Streaming tensor-quadrature of a product of four eigenfunctions (oracle for
/// the closed form; no basis storage, usable in any dimension).
double quartic_product_quadrature(const std::array<Mode, 4>& modes, const BoxDomain& box,
                                  int nodes_per_axis, bool normalized = true);

}  // namespace bifurc

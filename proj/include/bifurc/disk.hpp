// Unit-disk backend for the degenerate second-eigenvalue example: Bessel
// evaluation, polar quadrature of the reduced equation, and detection of the
// real-solution continuum.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "bifurc/alpha_system.hpp"

namespace bifurc {

/// Bessel function of the first kind (ascending series for small arguments,
/// backward recurrence for large). Absolute error < 1e-12 on [0, 50].
double bessel_j(int order, double x);

/// n-th positive zero of J_1 (bracketed scan + Newton polish).
double bessel_j1_zero(int n);

/// The second Dirichlet eigenvalue pair on the unit disk:
/// u1 = c J_1(j r) cos t, u2 = c J_1(j r) sin t, normalized so that the L2
/// norm of each is 1. Quadrature is Gauss-Legendre in r (with the Jacobian
/// weight) and uniform trapezoid in the angle.
class DiskSecondEigenpair {
public:
  DiskSecondEigenpair(int radial_nodes = 128, int angular_nodes = 256);

  double eigenvalue() const { return j11_ * j11_; }
  double first_zero() const { return j11_; }
  double norm_constant() const { return c_; }

  /// P2(alpha) = integral |u1 + alpha u2|^sigma (u1 + alpha u2)(alpha u1 - u2).
  /// `frame` rotates the angular basis by that angle before evaluating.
  cdouble eval_P2(cdouble alpha, double sigma = 2.0, double frame = 0.0) const;

  /// Central-difference real Jacobian of (Re P2, Im P2) at alpha.
  Eigen::Matrix2d real_jacobian_fd(cdouble alpha, double h = 1e-6) const;

  struct StructuralFit {
    cdouble C;                    // fitted constant of C((a^2-|a|^2)a + 2i Im a)
    double max_rel_residual = 0;  // max |P2 - C s| / |C| over the samples
  };
  StructuralFit fit_structural_form(int samples = 50, std::uint64_t seed = 42) const;

private:
  int radial_nodes_;
  int angular_nodes_;
  double j11_;
  double c_;
  Eigen::VectorXd radial_;          // J_1(j r_i)
  Eigen::VectorXd radial_weight_;   // w_i r_i
  Eigen::VectorXd angles_;
};

/// Reduced-system adapter so the multistart machinery runs on the disk pair.
class DiskReducedSystem : public ReducedSystem {
public:
  explicit DiskReducedSystem(const DiskSecondEigenpair& pair, double sigma = 2.0)
      : pair_(&pair), sigma_(sigma) {}
  int components() const override { return 1; }
  Eigen::VectorXcd eval(const Eigen::VectorXcd& alpha) const override;
  Eigen::MatrixXd real_jacobian(const Eigen::VectorXcd& alpha) const override;

private:
  const DiskSecondEigenpair* pair_;
  double sigma_;
};

struct ContinuumReport {
  bool continuum_detected = false;
  cdouble C;
  double max_structural_residual = 0;
  double max_real_abs_P = 0;      // max |P2| over the real probe grid
  double jacobian_det_sample = 0; // row-normalized det at alpha = 1/2
};

/// Confirms that every real alpha solves the reduced equation, that the real
/// Jacobian is rank-deficient there, and fits the structural constant. The
/// nondegenerate-seed construction does not apply when this reports true.
ContinuumReport detect_continuum(const DiskSecondEigenpair& pair);

}  // namespace bifurc

// Spectral Galerkin truncation on a box: full sine-mode tensor up to a cutoff,
// uniform-grid collocation with an exact discrete sine-transform pair, and the
// kernel/complement split for the Lyapunov-Schmidt reduction.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bifurc/box.hpp"

namespace bifurc {

using cdouble = std::complex<double>;

class GalerkinSpace {
public:
  /// All modes with max_j k_j <= cutoff; collocation uses oversample*cutoff
  /// uniform interior points per axis so the sine-transform pair is exact for
  /// the nonlinear degrees handled here.
  GalerkinSpace(const BoxDomain& box, const EigenGroup& group, int cutoff, int oversample = 4);

  const BoxDomain& box() const { return box_; }
  const EigenGroup& group() const { return group_; }
  int cutoff() const { return cutoff_; }
  long mode_count() const { return n_modes_; }
  long value_count() const { return n_values_; }
  int group_size() const { return static_cast<int>(group_flat_.size()); }
  const std::vector<long>& group_indices() const { return group_flat_; }

  double group_eigenvalue() const { return group_.eigenvalue; }
  /// Dirichlet eigenvalue of every truncation mode, flattened.
  const Eigen::VectorXd& mode_eigenvalues() const { return eigenvalues_; }
  /// min |lambda_m - group eigenvalue| over the complement.
  double spectral_gap() const { return gap_; }

  Eigen::VectorXcd to_values(const Eigen::VectorXcd& coeffs) const;
  Eigen::VectorXcd to_coeffs(const Eigen::VectorXcd& values) const;

  /// Coefficients of |u|^sigma u via collocation.
  Eigen::VectorXcd nonlinear_coeffs(const Eigen::VectorXcd& coeffs, double sigma) const;

  /// Full coefficient vector carrying `group_coeffs` on the kernel modes.
  Eigen::VectorXcd embed_group(const Eigen::VectorXcd& group_coeffs) const;
  Eigen::VectorXcd extract_group(const Eigen::VectorXcd& coeffs) const;
  /// Zeroes the kernel-mode entries (the projection onto the complement).
  void project_complement(Eigen::VectorXcd& coeffs) const;

  double sup_norm(const Eigen::VectorXcd& coeffs) const;
  double h1_norm(const Eigen::VectorXcd& coeffs) const;

private:
  Eigen::VectorXcd apply_axis_transforms(const Eigen::VectorXcd& input,
                                         const std::vector<Eigen::MatrixXcd>& mats,
                                         long in_axis_dim, long out_axis_dim) const;

  BoxDomain box_;
  EigenGroup group_;
  int cutoff_;
  int points_per_axis_;
  long n_modes_;
  long n_values_;
  std::vector<long> group_flat_;
  Eigen::VectorXd eigenvalues_;
  double gap_;
  std::vector<Eigen::MatrixXcd> synthesis_;  // per axis, points x cutoff
  std::vector<Eigen::MatrixXcd> analysis_;   // per axis, cutoff x points
};

}  // namespace bifurc

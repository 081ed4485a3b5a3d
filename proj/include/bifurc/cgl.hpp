// Stability of bound states under the complex Ginzburg-Landau flow: parameter
// correspondence, linear spectrum, Floquet multipliers of the period map of
// the linearized equation, and a nonlinear spectral simulator.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bifurc/galerkin.hpp"

namespace bifurc {

struct CGLParams {
  double theta = 0;  // |theta| < pi/2
  double gamma = 0;
  double k = 0;
  double omega = 0;  // signed; the wave rotates as e^{i omega t}
  double sigma = 2;

  double period() const;  // 2 pi / |omega|
};

struct BranchParams {
  CGLParams params;
  double rescale = 1;  // factor applied to the profile so |eta| becomes 1
};

/// k - i omega = e^{i theta} lambda, gamma = theta + arg(-eta); the profile is
/// rescaled by |eta|^{1/sigma} to normalize |eta| to 1.
BranchParams params_from_branch(cdouble lambda, cdouble eta, double theta, double sigma);

/// Eigenvalues -e^{i theta} lambda_j + k of A over the truncation modes.
Eigen::VectorXcd linear_spectrum_A(const CGLParams& params, const GalerkinSpace& space);
double max_real_part(const Eigen::VectorXcd& spectrum);

struct MonodromyResult {
  Eigen::VectorXcd multipliers;  // sorted by modulus, descending
  double max_modulus = 0;
  int matrix_dim = 0;
  Eigen::MatrixXd matrix;      // period map on stacked (Re, Im) coefficients
  double guard_delta = 0;      // relative change of max modulus under dt/2
};

struct MonodromyOptions {
  int steps_per_period = 2048;
  bool guard = true;
  double guard_tol = 1e-6;
};

/// Integrates v_t = A v + B(t) v over one period for every stacked real basis
/// vector (the map couples v and conj v, so it is R-linear only). The linear
/// part propagates exactly; B(t) is evaluated analytically in t.
MonodromyResult monodromy(const Eigen::VectorXcd& u_coeffs, const CGLParams& params,
                          const GalerkinSpace& space, const MonodromyOptions& options = {});

/// Exact propagator S(T) = e^{AT} in the same stacked real form.
Eigen::MatrixXd linear_period_matrix(const CGLParams& params, const GalerkinSpace& space);

/// Spectrum of the autonomous linearization A + B for stationary states
/// (omega = 0), in the stacked real form.
Eigen::VectorXcd autonomous_linearization_spectrum(const Eigen::VectorXcd& u_coeffs,
                                                   const CGLParams& params,
                                                   const GalerkinSpace& space);

struct SimOptions {
  double dt = 0;              // 0: period/2048 (or 1e-3 when omega = 0)
  int sample_stride = 8;
  double blowup_ceiling = 1e3;
  bool disable_nonlinearity = false;
};

struct SimTrajectory {
  std::vector<double> times;
  std::vector<double> l2_norms;
  std::vector<double> sup_norms;
  std::vector<double> orbit_distances;  // inf_{|z|=1} |v - z e^{i omega t} u|_L2
  std::vector<Eigen::VectorXd> kernel_mode_abs;  // |coefficient| per kernel mode
  Eigen::VectorXcd final_coeffs;
  bool blew_up = false;
};

/// Semi-implicit spectral stepping of v_t = e^{i theta} Delta v +
/// e^{i gamma}|v|^sigma v + k v (exact linear propagation, explicit
/// nonlinearity). `reference` supplies the gauge-orbit distance diagnostic.
SimTrajectory simulate_cgl(const Eigen::VectorXcd& initial, const CGLParams& params,
                           const GalerkinSpace& space, double t_end,
                           const Eigen::VectorXcd& reference, const SimOptions& options = {});

struct InstabilityReport {
  std::string verdict;  // "unstable" | "first_eigenvalue_not_covered" | "inconclusive"
  double max_re_spectrum = 0;
  double spectrum_band = 0;    // O(eps^sigma) band: (sigma+1) sup|u|^sigma
  double max_multiplier = 0;
  double floquet_rate = 0;     // log(max multiplier)/T
  double measured_rate = 0;    // e-folding rate of the gauge-orbit deviation
  bool spectrum_signal = false;
  bool multiplier_signal = false;
  bool growth_signal = false;  // measured rate within 25% of the Floquet rate
  Eigen::VectorXcd multipliers;
  SimTrajectory trajectory;
};

struct VerdictOptions {
  MonodromyOptions monodromy;
  double perturbation = 1e-6;  // relative to |u|_L2
  std::uint64_t rng_seed = 1234;
  double rate_tolerance = 0.25;
};

/// Combines the linear-spectrum, Floquet and nonlinear-simulation signals.
/// `u_coeffs` is the bound-state profile in the bound-state normalization; the
/// CGL rescaling is applied internally.
InstabilityReport instability_verdict(const Eigen::VectorXcd& u_coeffs, cdouble lambda,
                                      cdouble eta, double theta, double sigma,
                                      const GalerkinSpace& space,
                                      const VerdictOptions& options = {});

}  // namespace bifurc

// Lyapunov-Schmidt branch construction on the Galerkin truncation: fixed-point
// solve for the complement part y, Newton solve of the reduced equations in
// (lambda, alpha), continuation in eps, and branch-limit verification.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bifurc/alpha_system.hpp"
#include "bifurc/galerkin.hpp"

namespace bifurc {

struct ReducedState {
  double eps = 0;
  cdouble lambda;
  AlphaVector alpha;
  Eigen::VectorXcd y;  // full-length coefficients, zero on the kernel modes
  cdouble eta;
  double sigma = 2;

  /// Full coefficient vector y + eps * (u_lead + sum alpha_j u_j).
  Eigen::VectorXcd field(const GalerkinSpace& space) const;
};

struct BranchSample {
  ReducedState state;
  double pde_residual = 0;
  double y_norm = 0;  // H^1_0 norm of the complement part
};

struct YSolveOptions {
  double tol = 1e-12;
  int max_iterations = 200;
};

/// Fixed-point solve of y = (lambda - PL)^{-1} [-P M(y + sum eps_j u_j)] with
/// M u = -eta |u|^sigma u. `group_eps_coeffs` are the kernel-mode coefficients
/// (the eps_j). Throws SolverError on resolvent near-singularity or
/// non-contraction.
Eigen::VectorXcd solve_y(const Eigen::VectorXcd& group_eps_coeffs, cdouble lambda,
                         const GalerkinSpace& space, cdouble eta, double sigma,
                         const YSolveOptions& options = {});

struct ReducedSolveOptions {
  double tol = 1e-11;
  int max_iterations = 40;
  YSolveOptions y_options;
};

/// Newton solve of the full reduced equations (kernel-mode projections of the
/// bound-state equation, with solve_y inside every residual evaluation) for
/// (lambda, alpha) at fixed eps. At eps = 0 returns (group eigenvalue, seed).
ReducedState solve_reduced(double eps, const AlphaVector& seed, cdouble lambda_guess,
                           const GalerkinSpace& space, const GroupMomentEvaluator& moments,
                           cdouble eta, double sigma, const ReducedSolveOptions& options = {});

/// Galerkin residual of lambda u + Delta u - eta |u|^sigma u = 0 (L2 norm over
/// the truncation).
double pde_residual(const Eigen::VectorXcd& coeffs, cdouble lambda, cdouble eta, double sigma,
                    const GalerkinSpace& space);

struct BranchTrace {
  std::vector<BranchSample> samples;
  bool completed = false;
};

struct TraceOptions {
  ReducedSolveOptions solve;
  int max_bisections = 5;
  double residual_tol = 1e-8;  // accepted pde_residual per sample
};

/// Continuation from eps_max/steps to eps_max with warm starts; on step
/// failure the eps-step is bisected up to max_bisections before aborting with
/// the partial branch.
BranchTrace trace_branch(const AlphaVector& seed, double eps_max, int steps,
                         const GalerkinSpace& space, const GroupMomentEvaluator& moments,
                         cdouble eta, double sigma, const TraceOptions& options = {});

/// Default continuation ceiling 0.2 * gap^{1/sigma}.
double default_eps_max(const GalerkinSpace& space, double sigma);

struct BranchLimitReport {
  AlphaVector alpha;            // extrapolated limit direction
  double alpha_fit_residual = 0;
  double p_norm = 0;            // |P(alpha)| at the recovered limit
  double lead_scale = 0;        // limit of the kernel lead coefficient c > 0
  cdouble lambda_rate_lhs;      // extrapolated (lambda - lambda~)/sup^sigma
  cdouble lambda_rate_rhs;      // eta c^sigma int |u_A|^{sigma+2} / int |u_A|^2
  double sup_of_normalized = 0; // sup norm after normalization (should be 1)
};

/// Normalizes each sample by its sup norm, projects onto the kernel, and
/// extrapolates the limit direction and the lambda rate as eps -> 0.
BranchLimitReport verify_branch_limit(const std::vector<BranchSample>& samples,
                                      const GalerkinSpace& space,
                                      const GroupMomentEvaluator& moments);

}  // namespace bifurc

// The reduced polynomial system P_m(alpha) = 0 over an eigengroup: evaluation,
// real Jacobian, multistart damped Newton, nondegeneracy classification and
// branch-seed counting.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <vector>

#include "bifurc/moments.hpp"

namespace bifurc {

/// A point of the reduced system: the basis function `lead` has coefficient 1,
/// `alpha` holds the coefficients of the remaining basis functions in basis
/// order.
struct AlphaVector {
  int lead = 0;
  Eigen::VectorXcd alpha;
};

struct SeedSolution {
  AlphaVector alpha;
  double residual = 0;      // max |P_m|
  double jacobian_det = 0;  // det of the real Jacobian scaled by its largest row norm
  bool nondegenerate = false;
  bool is_real = false;
};

/// Abstract reduced system with p-1 complex components. A prefix of the
/// coordinates may be pinned to zero during branch enumeration; the trailing
/// `free` coordinates are the Newton unknowns. Components and coordinates are
/// indexed identically.
class ReducedSystem {
public:
  virtual ~ReducedSystem() = default;
  virtual int components() const = 0;
  /// All components at the full coordinate vector.
  virtual Eigen::VectorXcd eval(const Eigen::VectorXcd& full_alpha) const = 0;
  /// Real Jacobian of (Re P, Im P) with respect to (Re alpha, Im alpha),
  /// size 2c x 2c, rows 2i/2i+1 = Re/Im P_i, cols 2j/2j+1 = Re/Im alpha_j.
  virtual Eigen::MatrixXd real_jacobian(const Eigen::VectorXcd& full_alpha) const = 0;
};

/// Box-group reduced system P_m(alpha) = integral |u_A|^sigma u_A
/// (alpha_m u_lead - u_m) dx, backed by quadrature moments. Holds a reference;
/// the evaluator must outlive the system.
class GroupReducedSystem : public ReducedSystem {
public:
  GroupReducedSystem(const GroupMomentEvaluator& moments, int lead);

  int components() const override { return static_cast<int>(index_.size()); }
  Eigen::VectorXcd eval(const Eigen::VectorXcd& full_alpha) const override;
  Eigen::MatrixXd real_jacobian(const Eigen::VectorXcd& full_alpha) const override;

  int lead() const { return lead_; }
  /// Full group coefficient vector (lead entry 1).
  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& full_alpha) const;

private:
  const GroupMomentEvaluator* moments_;
  int lead_;
  std::vector<int> index_;  // component -> basis index
};

/// Central-difference check of the analytic Jacobian; returns the maximum
/// entrywise deviation.
double jacobian_fd_error(const ReducedSystem& system, const Eigen::VectorXcd& full_alpha,
                         double h = 1e-5);

struct StartGrid {
  double re_min = -2.0, re_max = 2.0;
  double im_min = -2.0, im_max = 2.0;
  double step = 0.5;
  bool real_only = false;
  double jitter = 0.0;        // relative grid jitter, 0 disables
  std::uint64_t rng_seed = 0;
};

struct MultistartOptions {
  StartGrid grid;
  double newton_tol = 1e-10;
  int max_iterations = 40;
  double dedup_tol = 1e-6;
  double degeneracy_tol = 1e-8;
  double real_tol = 1e-8;
  int continuum_threshold = 25;
};

struct MultistartSummary {
  std::vector<SeedSolution> seeds;  // canonical order
  long starts = 0;
  long converged = 0;
  bool continuum_suspected = false;
};

/// Damped Newton from every lattice start; converged roots are deduplicated,
/// canonically sorted and classified by the full real Jacobian. The first
/// `pinned` coordinates are held at zero.
MultistartSummary multistart_solve(const ReducedSystem& system, int pinned,
                                   const MultistartOptions& options);

struct BranchEnumeration {
  std::vector<SeedSolution> seeds;
  int real_count = 0;                    // real nondegenerate seeds
  std::map<int, int> real_by_nonzero;    // #nonzero coefficients -> count
  long starts = 0;
  long converged = 0;
  bool continuum_suspected = false;
};

/// Iterates multistart over leads: lead 0 first, then lead 1 with the first
/// coefficient pinned to zero, and so on; unions the results.
BranchEnumeration enumerate_branches(const GroupMomentEvaluator& moments,
                                     const MultistartOptions& options);

/// Spec-shaped wrappers (construct a fresh evaluator; prefer the class API in
/// hot paths).
Eigen::VectorXcd eval_P(const AlphaVector& alpha, double sigma, const EigenGroup& group,
                        const BoxDomain& box, int nodes_per_axis = 0);
Eigen::MatrixXd eval_real_jacobian(const AlphaVector& alpha, double sigma,
                                   const EigenGroup& group, const BoxDomain& box,
                                   int nodes_per_axis = 0);

/// Closed form of P for sigma = 2 under the quartic table's assumptions:
/// P_m = (A - 3B) a_m (1 - |a_m|^2) + B (a_m - conj a_m)(1 + sum_j a_j^2).
/// Refuses (ConfigError) when the table's cross terms do not vanish or the
/// pair value is not uniform.
Eigen::VectorXcd closed_form_P_sigma2(const AlphaVector& alpha, const QuarticTable& table);

}  // namespace bifurc

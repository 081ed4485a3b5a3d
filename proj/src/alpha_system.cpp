#include "bifurc/alpha_system.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

// rows 2i/2i+1 = Re/Im of complex row i; same for columns
void fill_real_block(Eigen::MatrixXd& jac, int i, int j, cdouble d1, cdouble d2) {
  const cdouble dx = d1 + d2;            // d/d(Re alpha_j)
  const cdouble dy = cdouble(0, 1) * (d1 - d2);  // d/d(Im alpha_j)
  jac(2 * i, 2 * j) = dx.real();
  jac(2 * i, 2 * j + 1) = dy.real();
  jac(2 * i + 1, 2 * j) = dx.imag();
  jac(2 * i + 1, 2 * j + 1) = dy.imag();
}

Eigen::VectorXd to_real(const Eigen::VectorXcd& v) {
  Eigen::VectorXd out(2 * v.size());
  for (int i = 0; i < v.size(); ++i) {
    out[2 * i] = v[i].real();
    out[2 * i + 1] = v[i].imag();
  }
  return out;
}

double round_coord(double v) { return std::round(v * 1e7) / 1e7; }

bool canonical_less(const SeedSolution& a, const SeedSolution& b) {
  if (a.alpha.lead != b.alpha.lead) return a.alpha.lead < b.alpha.lead;
  for (int i = 0; i < a.alpha.alpha.size(); ++i) {
    const double ar = round_coord(a.alpha.alpha[i].real());
    const double br = round_coord(b.alpha.alpha[i].real());
    if (ar != br) return ar < br;
    const double ai = round_coord(a.alpha.alpha[i].imag());
    const double bi = round_coord(b.alpha.alpha[i].imag());
    if (ai != bi) return ai < bi;
  }
  return false;
}

// Determinant of the Jacobian scaled by its largest row norm. Scale-free like
// a per-row normalization, but a rank-deficient row stays small instead of
// being blown up to unit size.
double scaled_det(Eigen::MatrixXd jac) {
  if (jac.rows() == 0) return 1.0;  // empty system: trivially nondegenerate
  double scale = 0.0;
  for (int r = 0; r < jac.rows(); ++r) scale = std::max(scale, jac.row(r).norm());
  if (scale < 1e-300) return 0.0;
  jac /= scale;
  return jac.determinant();
}

}  // namespace

GroupReducedSystem::GroupReducedSystem(const GroupMomentEvaluator& moments, int lead)
    : moments_(&moments), lead_(lead) {
  const int p = moments_->basis_size();
  if (lead_ < 0 || lead_ >= p) throw ConfigError("GroupReducedSystem: lead index out of range");
  for (int m = 0; m < p; ++m)
    if (m != lead_) index_.push_back(m);
}

Eigen::VectorXcd GroupReducedSystem::coefficients(const Eigen::VectorXcd& full_alpha) const {
  const int p = moments_->basis_size();
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(p);
  c[lead_] = 1.0;
  for (int i = 0; i < components(); ++i) c[index_[i]] = full_alpha[i];
  return c;
}

Eigen::VectorXcd GroupReducedSystem::eval(const Eigen::VectorXcd& full_alpha) const {
  const Eigen::VectorXcd g = moments_->group_moments(coefficients(full_alpha));
  Eigen::VectorXcd out(components());
  for (int i = 0; i < components(); ++i) out[i] = full_alpha[i] * g[lead_] - g[index_[i]];
  return out;
}

Eigen::MatrixXd GroupReducedSystem::real_jacobian(const Eigen::VectorXcd& full_alpha) const {
  Eigen::MatrixXcd s1, s2;
  Eigen::VectorXcd g;
  moments_->wirtinger_moments(coefficients(full_alpha), s1, s2, g);
  const int c = components();
  Eigen::MatrixXd jac(2 * c, 2 * c);
  for (int i = 0; i < c; ++i) {
    const int bi = index_[i];
    for (int j = 0; j < c; ++j) {
      const int bj = index_[j];
      cdouble d1 = full_alpha[i] * s1(bj, lead_) - s1(bj, bi);
      if (i == j) d1 += g[lead_];
      const cdouble d2 = full_alpha[i] * s2(bj, lead_) - s2(bj, bi);
      fill_real_block(jac, i, j, d1, d2);
    }
  }
  return jac;
}

double jacobian_fd_error(const ReducedSystem& system, const Eigen::VectorXcd& full_alpha,
                         double h) {
  const int c = system.components();
  const Eigen::MatrixXd analytic = system.real_jacobian(full_alpha);
  Eigen::MatrixXd fd(2 * c, 2 * c);
  for (int j = 0; j < c; ++j) {
    for (int part = 0; part < 2; ++part) {
      Eigen::VectorXcd ap = full_alpha, am = full_alpha;
      const cdouble delta = part == 0 ? cdouble(h, 0) : cdouble(0, h);
      ap[j] += delta;
      am[j] -= delta;
      const Eigen::VectorXd diff = (to_real(system.eval(ap)) - to_real(system.eval(am))) / (2 * h);
      fd.col(2 * j + part) = diff;
    }
  }
  return (analytic - fd).cwiseAbs().maxCoeff();
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  Eigen::VectorXcd alpha;  // full coordinates
  double residual = 0;
};

// Damped (Armijo on |P|^2) Newton in the free coordinates; pinned prefix stays
// zero. real_only restricts to the real subspace, which is invariant for the
// conjugation-symmetric systems handled here.
NewtonOutcome newton_from(const ReducedSystem& system, int pinned,
                          const Eigen::VectorXcd& start, const MultistartOptions& opt,
                          bool real_only) {
  const int c = system.components();
  const int nf = c - pinned;
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(c);
  full.tail(nf) = start.tail(nf);
  if (real_only) full = full.real().cast<cdouble>();

  NewtonOutcome out;
  Eigen::VectorXcd residual = system.eval(full);
  double phi = to_real(residual).squaredNorm();
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (residual.cwiseAbs().maxCoeff() < opt.newton_tol) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd jac = system.real_jacobian(full);
    Eigen::VectorXd f;
    Eigen::VectorXd step;
    if (real_only) {
      // even rows/cols: Re P vs Re alpha on the free block
      Eigen::MatrixXd jr(nf, nf);
      Eigen::VectorXd fr(nf);
      for (int i = 0; i < nf; ++i) {
        fr[i] = residual[pinned + i].real();
        for (int j = 0; j < nf; ++j) jr(i, j) = jac(2 * (pinned + i), 2 * (pinned + j));
      }
      step = jr.fullPivLu().solve(-fr);
      if (!step.allFinite()) break;
    } else {
      Eigen::MatrixXd jr(2 * nf, 2 * nf);
      Eigen::VectorXd fr(2 * nf);
      for (int i = 0; i < nf; ++i) {
        fr[2 * i] = residual[pinned + i].real();
        fr[2 * i + 1] = residual[pinned + i].imag();
        for (int j = 0; j < nf; ++j) {
          jr.block<2, 2>(2 * i, 2 * j) = jac.block<2, 2>(2 * (pinned + i), 2 * (pinned + j));
        }
      }
      step = jr.fullPivLu().solve(-fr);
      if (!step.allFinite()) break;
    }

    double damp = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Eigen::VectorXcd trial = full;
      for (int j = 0; j < nf; ++j) {
        if (real_only)
          trial[pinned + j] += damp * step[j];
        else
          trial[pinned + j] += damp * cdouble(step[2 * j], step[2 * j + 1]);
      }
      const Eigen::VectorXcd rt = system.eval(trial);
      const double phit = to_real(rt).squaredNorm();
      if (phit <= (1.0 - 1e-4 * damp) * phi || phit < opt.newton_tol * opt.newton_tol) {
        full = trial;
        residual = rt;
        phi = phit;
        accepted = true;
        break;
      }
      damp *= 0.5;
    }
    if (!accepted) break;
  }
  if (!out.converged && residual.cwiseAbs().maxCoeff() < opt.newton_tol) out.converged = true;
  out.alpha = full;
  out.residual = residual.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

MultistartSummary multistart_solve(const ReducedSystem& system, int pinned,
                                   const MultistartOptions& options) {
  const int c = system.components();
  const int nf = c - pinned;
  if (nf < 0) throw ConfigError("multistart_solve: pinned exceeds component count");

  MultistartSummary summary;
  if (c == 0) {
    // simple eigenvalue: nothing to solve, the lead mode itself is the seed
    SeedSolution seed;
    seed.jacobian_det = 1.0;
    seed.nondegenerate = true;
    seed.is_real = true;
    summary.seeds.push_back(std::move(seed));
    summary.starts = summary.converged = 1;
    return summary;
  }

  // Lattice of starts over the free coordinates.
  const StartGrid& grid = options.grid;
  std::vector<cdouble> axis;
  const int nre = static_cast<int>(std::floor((grid.re_max - grid.re_min) / grid.step + 1e-9)) + 1;
  const int nim = grid.real_only
                      ? 1
                      : static_cast<int>(std::floor((grid.im_max - grid.im_min) / grid.step + 1e-9)) + 1;
  std::mt19937_64 rng(grid.rng_seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  for (int i = 0; i < nre; ++i)
    for (int j = 0; j < nim; ++j) {
      double re = grid.re_min + i * grid.step;
      double im = grid.real_only ? 0.0 : grid.im_min + j * grid.step;
      if (grid.jitter > 0) {
        re += grid.jitter * grid.step * unit(rng);
        if (!grid.real_only) im += grid.jitter * grid.step * unit(rng);
      }
      axis.emplace_back(re, im);
    }

  std::vector<SeedSolution> found;
  long total = 1;
  for (int j = 0; j < nf; ++j) {
    total *= static_cast<long>(axis.size());
    if (total > 2'000'000)
      throw ConfigError("multistart_solve: start lattice too large; restrict the grid or use "
                        "real-only starts");
  }
  for (long s = 0; s < total; ++s) {
    Eigen::VectorXcd start = Eigen::VectorXcd::Zero(c);
    long rem = s;
    for (int j = 0; j < nf; ++j) {
      start[pinned + j] = axis[rem % axis.size()];
      rem /= axis.size();
    }
    ++summary.starts;
    const NewtonOutcome run = newton_from(system, pinned, start, options, grid.real_only);
    if (!run.converged) continue;
    ++summary.converged;

    bool duplicate = false;
    for (const auto& seed : found) {
      double dist = 0;
      for (int i = 0; i < c; ++i)
        dist = std::max(dist, std::abs(seed.alpha.alpha[i] - run.alpha[i]));
      if (dist < options.dedup_tol) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    SeedSolution seed;
    seed.alpha.alpha = run.alpha;
    seed.residual = run.residual;
    seed.jacobian_det = scaled_det(system.real_jacobian(run.alpha));
    seed.nondegenerate = std::abs(seed.jacobian_det) > options.degeneracy_tol;
    seed.is_real = c == 0 || run.alpha.imag().cwiseAbs().maxCoeff() < options.real_tol;
    found.push_back(std::move(seed));
  }

  const long real_roots =
      std::count_if(found.begin(), found.end(), [](const SeedSolution& s) { return s.is_real; });
  summary.continuum_suspected = real_roots > options.continuum_threshold;

  std::sort(found.begin(), found.end(), canonical_less);
  summary.seeds = std::move(found);
  return summary;
}

BranchEnumeration enumerate_branches(const GroupMomentEvaluator& moments,
                                     const MultistartOptions& options) {
  const int p = moments.basis_size();
  if (p > 6)
    throw ConfigError("enumerate_branches: multiplicity " + std::to_string(p) +
                      " too large for lattice multistart");
  BranchEnumeration out;
  for (int lead = 0; lead < p; ++lead) {
    if (p == 1) {
      // simple eigenvalue: empty reduced system, one trivial nondegenerate seed
      SeedSolution seed;
      seed.alpha.lead = 0;
      seed.jacobian_det = 1.0;
      seed.nondegenerate = true;
      seed.is_real = true;
      out.seeds.push_back(seed);
      break;
    }
    GroupReducedSystem system(moments, lead);
    MultistartSummary summary = multistart_solve(system, /*pinned=*/lead, options);
    out.starts += summary.starts;
    out.converged += summary.converged;
    out.continuum_suspected = out.continuum_suspected || summary.continuum_suspected;
    for (auto& seed : summary.seeds) {
      seed.alpha.lead = lead;
      out.seeds.push_back(std::move(seed));
    }
  }
  for (const auto& seed : out.seeds) {
    if (!(seed.is_real && seed.nondegenerate)) continue;
    ++out.real_count;
    int nonzero = 1;  // the lead coefficient
    for (int i = 0; i < seed.alpha.alpha.size(); ++i)
      if (std::abs(seed.alpha.alpha[i]) > 1e-6) ++nonzero;
    ++out.real_by_nonzero[nonzero];
  }
  return out;
}

Eigen::VectorXcd eval_P(const AlphaVector& alpha, double sigma, const EigenGroup& group,
                        const BoxDomain& box, int nodes_per_axis) {
  GroupMomentEvaluator moments(group, box, sigma, nodes_per_axis);
  GroupReducedSystem system(moments, alpha.lead);
  return system.eval(alpha.alpha);
}

Eigen::MatrixXd eval_real_jacobian(const AlphaVector& alpha, double sigma,
                                   const EigenGroup& group, const BoxDomain& box,
                                   int nodes_per_axis) {
  GroupMomentEvaluator moments(group, box, sigma, nodes_per_axis);
  GroupReducedSystem system(moments, alpha.lead);
  return system.real_jacobian(alpha.alpha);
}

Eigen::VectorXcd closed_form_P_sigma2(const AlphaVector& alpha, const QuarticTable& table) {
  if (!table.cross_ok)
    throw ConfigError("closed_form_P_sigma2: mixed quartic integrals do not vanish for this group");
  if (!table.pair_uniform)
    throw ConfigError("closed_form_P_sigma2: pair integral is not uniform across the group");
  const cdouble q = 1.0 + alpha.alpha.array().square().sum();
  Eigen::VectorXcd out(alpha.alpha.size());
  for (int m = 0; m < alpha.alpha.size(); ++m) {
    const cdouble a = alpha.alpha[m];
    out[m] = (table.A - 3.0 * table.B) * a * (1.0 - std::norm(a)) +
             table.B * (a - std::conj(a)) * q;
  }
  return out;
}

}  // namespace bifurc

#include "bifurc/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

Eigen::Matrix2d real_block(cdouble d1, cdouble d2) {
  // columns = derivatives wrt (Re, Im) of a coordinate, from the Wirtinger pair
  const cdouble dx = d1 + d2;
  const cdouble dy = cdouble(0, 1) * (d1 - d2);
  Eigen::Matrix2d b;
  b << dx.real(), dy.real(), dx.imag(), dy.imag();
  return b;
}

Eigen::VectorXcd group_coefficients(const AlphaVector& alpha, int p) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(p);
  c[alpha.lead] = 1.0;
  int i = 0;
  for (int m = 0; m < p; ++m)
    if (m != alpha.lead) c[m] = alpha.alpha[i++];
  return c;
}

}  // namespace

Eigen::VectorXcd ReducedState::field(const GalerkinSpace& space) const {
  const int p = space.group_size();
  Eigen::VectorXcd full = space.embed_group(eps * group_coefficients(alpha, p));
  full += y;
  return full;
}

Eigen::VectorXcd solve_y(const Eigen::VectorXcd& group_eps_coeffs, cdouble lambda,
                         const GalerkinSpace& space, cdouble eta, double sigma,
                         const YSolveOptions& options) {
  const Eigen::VectorXd& lam = space.mode_eigenvalues();
  const auto& kernel = space.group_indices();

  // resolvent well-definedness on the complement
  double min_dist = std::numeric_limits<double>::infinity();
  for (long m = 0; m < lam.size(); ++m) {
    if (std::find(kernel.begin(), kernel.end(), m) != kernel.end()) continue;
    min_dist = std::min(min_dist, std::abs(lambda - lam[m]));
  }
  if (min_dist < 1e-9 * (1.0 + std::abs(lambda)))
    throw SolverError("solve_y: resolvent nearly singular on the complement");

  const Eigen::VectorXcd base = space.embed_group(group_eps_coeffs);
  const double cap = 1e3 * (1.0 + group_eps_coeffs.norm());
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(space.mode_count());
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    Eigen::VectorXcd w = space.nonlinear_coeffs(base + y, sigma);
    Eigen::VectorXcd y_next(space.mode_count());
    for (long m = 0; m < y_next.size(); ++m) y_next[m] = eta * w[m] / (lambda - lam[m]);
    space.project_complement(y_next);  // kernel coefficients stay exactly zero
    const double diff = (y_next - y).norm();
    y.swap(y_next);
    if (diff < options.tol) return y;
    if (y.norm() > cap)
      throw SolverError("solve_y: fixed-point iteration diverged (eps too large)");
  }
  throw SolverError("solve_y: fixed-point iteration did not converge");
}

namespace {

struct ReducedResidual {
  Eigen::VectorXcd f;  // component 0: lambda equation, then the alpha equations
  Eigen::VectorXcd y;
};

ReducedResidual reduced_residual(double eps, cdouble lambda, const AlphaVector& alpha,
                                 const GalerkinSpace& space, cdouble eta, double sigma,
                                 const YSolveOptions& yopts) {
  const int p = space.group_size();
  const Eigen::VectorXcd c = group_coefficients(alpha, p);
  ReducedResidual out;
  out.y = solve_y(eps * c, lambda, space, eta, sigma, yopts);
  const Eigen::VectorXcd u = space.embed_group(eps * c) + out.y;
  const Eigen::VectorXcd w = space.extract_group(space.nonlinear_coeffs(u, sigma));

  const double lam0 = space.group_eigenvalue();
  const double scale = std::pow(eps, sigma + 1);
  out.f.resize(p);
  out.f[0] = (lambda - lam0) - eta * w[alpha.lead] / eps;
  int i = 1;
  for (int m = 0; m < p; ++m) {
    if (m == alpha.lead) continue;
    out.f[i++] = -eta * (c[m] * w[alpha.lead] - w[m]) / scale;
  }
  return out;
}

}  // namespace

ReducedState solve_reduced(double eps, const AlphaVector& seed, cdouble lambda_guess,
                           const GalerkinSpace& space, const GroupMomentEvaluator& moments,
                           cdouble eta, double sigma, const ReducedSolveOptions& options) {
  const int p = space.group_size();
  ReducedState state;
  state.eps = eps;
  state.alpha = seed;
  state.eta = eta;
  state.sigma = sigma;
  state.lambda = eps == 0 ? cdouble(space.group_eigenvalue()) : lambda_guess;
  state.y = Eigen::VectorXcd::Zero(space.mode_count());
  if (eps == 0) return state;

  ReducedResidual res =
      reduced_residual(eps, state.lambda, state.alpha, space, eta, sigma, options.y_options);
  double phi = res.f.squaredNorm();

  const std::vector<int> index = [&] {
    std::vector<int> idx;
    for (int m = 0; m < p; ++m)
      if (m != seed.lead) idx.push_back(m);
    return idx;
  }();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (res.f.cwiseAbs().maxCoeff() < options.tol) {
      state.y = res.y;
      return state;
    }

    // quasi-Newton matrix: identity on the lambda equation, the alpha-system
    // Jacobian (times -eta) on the reduced block, plus the eps^sigma coupling
    // of the lambda equation to alpha
    Eigen::MatrixXcd s1, s2;
    Eigen::VectorXcd g;
    moments.wirtinger_moments(group_coefficients(state.alpha, p), s1, s2, g);
    const int n = 2 * p;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    jac.block<2, 2>(0, 0).setIdentity();
    const double eps_sigma = std::pow(eps, sigma);
    for (int j = 0; j < p - 1; ++j) {
      const int bj = index[j];
      jac.block<2, 2>(0, 2 + 2 * j) = real_block(-eta * eps_sigma * s1(bj, seed.lead),
                                                 -eta * eps_sigma * s2(bj, seed.lead));
      for (int i = 0; i < p - 1; ++i) {
        const int bi = index[i];
        cdouble d1 = state.alpha.alpha[i] * s1(bj, seed.lead) - s1(bj, bi);
        if (i == j) d1 += g[seed.lead];
        const cdouble d2 = state.alpha.alpha[i] * s2(bj, seed.lead) - s2(bj, bi);
        jac.block<2, 2>(2 + 2 * i, 2 + 2 * j) = real_block(-eta * d1, -eta * d2);
      }
    }

    Eigen::VectorXd rhs(n);
    rhs[0] = -res.f[0].real();
    rhs[1] = -res.f[0].imag();
    for (int i = 0; i < p - 1; ++i) {
      rhs[2 + 2 * i] = -res.f[1 + i].real();
      rhs[2 + 2 * i + 1] = -res.f[1 + i].imag();
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(rhs);
    if (!step.allFinite()) throw SolverError("solve_reduced: singular reduced Jacobian");

    double damp = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 12; ++bt) {
      cdouble lambda_trial = state.lambda + damp * cdouble(step[0], step[1]);
      AlphaVector alpha_trial = state.alpha;
      for (int i = 0; i < p - 1; ++i)
        alpha_trial.alpha[i] += damp * cdouble(step[2 + 2 * i], step[2 + 2 * i + 1]);
      try {
        ReducedResidual trial =
            reduced_residual(eps, lambda_trial, alpha_trial, space, eta, sigma, options.y_options);
        const double phit = trial.f.squaredNorm();
        if (phit <= (1.0 - 1e-4 * damp) * phi || phit < options.tol * options.tol) {
          state.lambda = lambda_trial;
          state.alpha = alpha_trial;
          res = std::move(trial);
          phi = phit;
          accepted = true;
          break;
        }
      } catch (const SolverError&) {
        // fall through to a smaller step
      }
      damp *= 0.5;
    }
    if (!accepted) throw SolverError("solve_reduced: line search stalled");
  }
  if (res.f.cwiseAbs().maxCoeff() < options.tol) {
    state.y = res.y;
    return state;
  }
  throw SolverError("solve_reduced: Newton did not reach tolerance");
}

double pde_residual(const Eigen::VectorXcd& coeffs, cdouble lambda, cdouble eta, double sigma,
                    const GalerkinSpace& space) {
  const Eigen::VectorXcd w = space.nonlinear_coeffs(coeffs, sigma);
  const Eigen::VectorXd& lam = space.mode_eigenvalues();
  double acc = 0;
  for (long m = 0; m < coeffs.size(); ++m)
    acc += std::norm((lambda - lam[m]) * coeffs[m] - eta * w[m]);
  return std::sqrt(acc);
}

double default_eps_max(const GalerkinSpace& space, double sigma) {
  return 0.2 * std::pow(space.spectral_gap(), 1.0 / sigma);
}

BranchTrace trace_branch(const AlphaVector& seed, double eps_max, int steps,
                         const GalerkinSpace& space, const GroupMomentEvaluator& moments,
                         cdouble eta, double sigma, const TraceOptions& options) {
  BranchTrace trace;
  if (steps < 1 || eps_max <= 0) throw ConfigError("trace_branch: bad eps_max/steps");

  AlphaVector alpha = seed;
  cdouble lambda = space.group_eigenvalue();
  double eps_prev = 0;
  double step = eps_max / steps;
  int failures = 0;
  while (eps_prev < eps_max * (1 - 1e-12)) {
    const double eps = std::min(eps_prev + step, eps_max);
    try {
      const ReducedState state =
          solve_reduced(eps, alpha, lambda, space, moments, eta, sigma, options.solve);
      BranchSample sample;
      sample.state = state;
      const Eigen::VectorXcd u = state.field(space);
      sample.pde_residual = pde_residual(u, state.lambda, eta, sigma, space);
      sample.y_norm = space.h1_norm(state.y);
      if (sample.pde_residual > options.residual_tol)
        throw SolverError("trace_branch: sample residual above tolerance");
      trace.samples.push_back(std::move(sample));
      alpha = state.alpha;
      lambda = state.lambda;
      eps_prev = eps;
      failures = 0;
    } catch (const SolverError&) {
      if (++failures > options.max_bisections) return trace;  // partial branch
      step /= 2;
    }
  }
  trace.completed = true;
  return trace;
}

BranchLimitReport verify_branch_limit(const std::vector<BranchSample>& samples,
                                      const GalerkinSpace& space,
                                      const GroupMomentEvaluator& moments) {
  if (samples.size() < 3)
    throw ConfigError("verify_branch_limit: need at least three samples");

  std::vector<const BranchSample*> ordered;
  for (const auto& s : samples) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const BranchSample* a, const BranchSample* b) { return a->state.eps < b->state.eps; });
  const size_t use = std::min<size_t>(5, ordered.size());

  const int p = space.group_size();
  const int lead = samples.front().state.alpha.lead;
  const double sigma = samples.front().state.sigma;
  const cdouble eta = samples.front().state.eta;
  const double lam0 = space.group_eigenvalue();

  // per-sample normalized kernel projections and rate values
  Eigen::VectorXd powers(use);
  Eigen::MatrixXcd chi(use, p);
  Eigen::VectorXcd rates(use);
  for (size_t s = 0; s < use; ++s) {
    const BranchSample& sample = *ordered[s];
    const Eigen::VectorXcd u = sample.state.field(space);
    const double sup = space.sup_norm(u);
    const Eigen::VectorXcd proj = space.extract_group(u) / sup;
    if (proj.norm() < 1e-8)
      throw SolverError("verify_branch_limit: branch is not rooted at this eigengroup");
    chi.row(s) = proj.transpose();
    powers[s] = std::pow(sample.state.eps, sigma);
    rates[s] = (sample.state.lambda - lam0) / std::pow(sup, sigma);
  }

  // least squares v(eps) = v0 + b eps^sigma per projected component
  auto extrapolate = [&](const Eigen::VectorXcd& vals, double* fit_residual) {
    Eigen::MatrixXd design(use, 2);
    design.col(0).setOnes();
    design.col(1) = powers;
    const Eigen::MatrixXd gram = (design.transpose() * design).inverse();
    Eigen::Vector2cd sol;
    Eigen::Vector2cd rhs;
    rhs[0] = vals.sum();
    rhs[1] = (powers.cast<cdouble>().array() * vals.array()).sum();
    sol = gram.cast<cdouble>() * rhs;
    if (fit_residual) {
      double worst = 0;
      for (size_t s = 0; s < use; ++s)
        worst = std::max(worst, std::abs(vals[s] - (sol[0] + sol[1] * powers[s])));
      *fit_residual = std::max(*fit_residual, worst);
    }
    return sol[0];
  };

  BranchLimitReport report;
  report.alpha.lead = lead;
  report.alpha.alpha.resize(p - 1);
  double fit_residual = 0;
  const cdouble c0 = extrapolate(chi.col(lead), &fit_residual);
  int i = 0;
  for (int m = 0; m < p; ++m) {
    if (m == lead) continue;
    const Eigen::VectorXcd ratio = chi.col(m).array() / chi.col(lead).array();
    report.alpha.alpha[i++] = extrapolate(ratio, &fit_residual);
  }
  report.alpha_fit_residual = fit_residual;
  report.lead_scale = c0.real();
  report.sup_of_normalized = 1.0;  // by construction of the normalization

  if (p > 1) {
    GroupReducedSystem system(moments, lead);
    report.p_norm = system.eval(report.alpha.alpha).cwiseAbs().maxCoeff();
  }

  report.lambda_rate_lhs = extrapolate(rates, nullptr);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(p);
  c[lead] = 1.0;
  i = 0;
  for (int m = 0; m < p; ++m)
    if (m != lead) c[m] = report.alpha.alpha[i++];
  const double num = moments.abs_power_integral(c, sigma + 2.0);
  const double den = moments.abs_power_integral(c, 2.0);
  report.lambda_rate_rhs = eta * std::pow(report.lead_scale, sigma) * num / den;
  return report;
}

}  // namespace bifurc

#include "bifurc/cgl.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "bifurc/errors.hpp"
#include "bifurc/moments.hpp"

namespace bifurc {

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::VectorXcd mode_symbols(const CGLParams& params, const GalerkinSpace& space) {
  const cdouble rot = std::polar(1.0, params.theta);
  Eigen::VectorXcd a(space.mode_count());
  for (long m = 0; m < a.size(); ++m) a[m] = -rot * space.mode_eigenvalues()[m] + params.k;
  return a;
}

struct LinearizedFields {
  Eigen::VectorXcd m2;  // e^{i gamma} (sigma+2)/2 |u|^sigma   (real magnitude, complex for convenience)
  Eigen::VectorXcd g;   // e^{i gamma} (sigma/2) u^2 |u|^{sigma-2}
};

LinearizedFields linearized_fields(const Eigen::VectorXcd& u_coeffs, const CGLParams& params,
                                   const GalerkinSpace& space) {
  const Eigen::VectorXcd uvals = space.to_values(u_coeffs);
  const cdouble phase = std::polar(1.0, params.gamma);
  LinearizedFields fields;
  fields.m2.resize(uvals.size());
  fields.g.resize(uvals.size());
  for (long q = 0; q < uvals.size(); ++q) {
    const double a2 = std::norm(uvals[q]);
    const double msig = a2 == 0 ? 0.0 : std::pow(a2, 0.5 * params.sigma);
    fields.m2[q] = phase * (0.5 * (params.sigma + 2.0)) * msig;
    fields.g[q] = a2 == 0 ? cdouble(0)
                          : phase * (0.5 * params.sigma) * (uvals[q] * uvals[q]) * msig / a2;
  }
  return fields;
}

// One exponential-midpoint step of v_t = A v + B(t) v for a complex
// coefficient column; B couples v and conj(v).
Eigen::VectorXcd step_linearized(const Eigen::VectorXcd& v, double t_mid, double dt,
                                 const Eigen::VectorXcd& exp_full,
                                 const Eigen::VectorXcd& exp_half,
                                 const LinearizedFields& fields, double omega,
                                 const GalerkinSpace& space) {
  const Eigen::VectorXcd v_half = exp_half.cwiseProduct(v);
  const Eigen::VectorXcd vals = space.to_values(v_half);
  const cdouble rot2 = std::polar(1.0, 2.0 * omega * t_mid);
  Eigen::VectorXcd bvals(vals.size());
  for (long q = 0; q < vals.size(); ++q)
    bvals[q] = fields.m2[q] * vals[q] + rot2 * fields.g[q] * std::conj(vals[q]);
  return exp_full.cwiseProduct(v) + dt * exp_half.cwiseProduct(space.to_coeffs(bvals));
}

Eigen::MatrixXd assemble_real_map(const GalerkinSpace& space,
                                  const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& map) {
  const long m = space.mode_count();
  Eigen::MatrixXd out(2 * m, 2 * m);
  for (long j = 0; j < 2 * m; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m);
    if (j < m)
      e[j] = 1.0;
    else
      e[j - m] = cdouble(0, 1);
    const Eigen::VectorXcd image = map(e);
    out.col(j).head(m) = image.real();
    out.col(j).tail(m) = image.imag();
  }
  return out;
}

Eigen::VectorXcd sorted_eigenvalues(const Eigen::MatrixXd& matrix) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(matrix, /*computeEigenvectors=*/false);
  Eigen::VectorXcd mu = es.eigenvalues();
  std::sort(mu.begin(), mu.end(),
            [](cdouble a, cdouble b) { return std::abs(a) > std::abs(b); });
  return mu;
}

Eigen::MatrixXd run_period_map(const Eigen::VectorXcd& u_coeffs, const CGLParams& params,
                               const GalerkinSpace& space, int steps) {
  const LinearizedFields fields = linearized_fields(u_coeffs, params, space);
  const Eigen::VectorXcd a = mode_symbols(params, space);
  const double T = params.period();
  const double dt = T / steps;
  const Eigen::VectorXcd exp_full = (a * dt).array().exp();
  const Eigen::VectorXcd exp_half = (a * (0.5 * dt)).array().exp();
  return assemble_real_map(space, [&](const Eigen::VectorXcd& e) {
    Eigen::VectorXcd v = e;
    for (int n = 0; n < steps; ++n)
      v = step_linearized(v, (n + 0.5) * dt, dt, exp_full, exp_half, fields, params.omega, space);
    return v;
  });
}

}  // namespace

double CGLParams::period() const {
  if (omega == 0) throw SolverError("CGLParams::period: omega = 0 has no period");
  return 2 * kPi / std::abs(omega);
}

BranchParams params_from_branch(cdouble lambda, cdouble eta, double theta, double sigma) {
  if (std::abs(theta) >= kPi / 2) throw ConfigError("params_from_branch: need |theta| < pi/2");
  if (std::abs(eta) == 0) throw ConfigError("params_from_branch: eta must be nonzero");
  BranchParams out;
  const cdouble rotated = std::polar(1.0, theta) * lambda;
  out.params.theta = theta;
  out.params.k = rotated.real();
  out.params.omega = -rotated.imag();
  out.params.gamma = theta + std::arg(-eta);
  out.params.sigma = sigma;
  out.rescale = std::pow(std::abs(eta), 1.0 / sigma);
  return out;
}

Eigen::VectorXcd linear_spectrum_A(const CGLParams& params, const GalerkinSpace& space) {
  return mode_symbols(params, space);
}

double max_real_part(const Eigen::VectorXcd& spectrum) {
  return spectrum.real().maxCoeff();
}

Eigen::MatrixXd linear_period_matrix(const CGLParams& params, const GalerkinSpace& space) {
  const Eigen::VectorXcd a = mode_symbols(params, space);
  const Eigen::VectorXcd exp_t = (a * params.period()).array().exp();
  return assemble_real_map(space, [&](const Eigen::VectorXcd& e) -> Eigen::VectorXcd {
    return exp_t.cwiseProduct(e);
  });
}

MonodromyResult monodromy(const Eigen::VectorXcd& u_coeffs, const CGLParams& params,
                          const GalerkinSpace& space, const MonodromyOptions& options) {
  if (std::abs(params.omega) < 1e-10)
    throw SolverError("monodromy: omega is numerically zero; use the autonomous spectrum");

  MonodromyResult result;
  result.matrix = run_period_map(u_coeffs, params, space, options.steps_per_period);
  result.matrix_dim = static_cast<int>(result.matrix.rows());
  result.multipliers = sorted_eigenvalues(result.matrix);
  result.max_modulus = std::abs(result.multipliers[0]);

  if (options.guard) {
    const Eigen::MatrixXd fine =
        run_period_map(u_coeffs, params, space, 2 * options.steps_per_period);
    const Eigen::VectorXcd mu_fine = sorted_eigenvalues(fine);
    const double max_fine = std::abs(mu_fine[0]);
    result.guard_delta = std::abs(result.max_modulus - max_fine) / max_fine;
    if (result.guard_delta > options.guard_tol)
      throw SolverError("monodromy: multipliers not converged in the time step");
    result.matrix = fine;
    result.multipliers = mu_fine;
    result.max_modulus = max_fine;
  }
  return result;
}

Eigen::VectorXcd autonomous_linearization_spectrum(const Eigen::VectorXcd& u_coeffs,
                                                   const CGLParams& params,
                                                   const GalerkinSpace& space) {
  const LinearizedFields fields = linearized_fields(u_coeffs, params, space);
  const Eigen::VectorXcd a = mode_symbols(params, space);
  const Eigen::MatrixXd gen = assemble_real_map(space, [&](const Eigen::VectorXcd& e) {
    const Eigen::VectorXcd vals = space.to_values(e);
    Eigen::VectorXcd bvals(vals.size());
    for (long q = 0; q < vals.size(); ++q)
      bvals[q] = fields.m2[q] * vals[q] + fields.g[q] * std::conj(vals[q]);
    return Eigen::VectorXcd(a.cwiseProduct(e) + space.to_coeffs(bvals));
  });
  return sorted_eigenvalues(gen);
}

SimTrajectory simulate_cgl(const Eigen::VectorXcd& initial, const CGLParams& params,
                           const GalerkinSpace& space, double t_end,
                           const Eigen::VectorXcd& reference, const SimOptions& options) {
  double dt = options.dt;
  if (dt <= 0) dt = std::abs(params.omega) < 1e-10 ? 1e-3 : params.period() / 2048;
  const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt)));
  dt = t_end / steps;

  const Eigen::VectorXcd a = mode_symbols(params, space);
  const Eigen::VectorXcd exp_full = (a * dt).array().exp();
  const cdouble phase = std::polar(1.0, params.gamma);
  const double ref_norm = reference.norm();

  auto nonlinear = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    if (options.disable_nonlinearity) return Eigen::VectorXcd::Zero(v.size());
    Eigen::VectorXcd vals = space.to_values(v);
    for (long q = 0; q < vals.size(); ++q) vals[q] = phase * nonlinearity(vals[q], params.sigma);
    return space.to_coeffs(vals);
  };

  SimTrajectory traj;
  Eigen::VectorXcd v = initial;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.l2_norms.push_back(v.norm());
    traj.sup_norms.push_back(space.sup_norm(v));
    const cdouble inner = (v.conjugate().cwiseProduct(std::polar(1.0, params.omega * t) * reference)).sum();
    const double d2 = v.squaredNorm() + ref_norm * ref_norm - 2.0 * std::abs(inner);
    traj.orbit_distances.push_back(std::sqrt(std::max(0.0, d2)));
    traj.kernel_mode_abs.push_back(space.extract_group(v).cwiseAbs());
  };
  record(0.0);

  for (int n = 0; n < steps; ++n) {
    // Lawson-RK2: exact linear propagation, Heun on the transformed nonlinearity
    const Eigen::VectorXcd k1 = nonlinear(v);
    const Eigen::VectorXcd predictor = exp_full.cwiseProduct(v + dt * k1);
    const Eigen::VectorXcd k2 = nonlinear(predictor);
    v = exp_full.cwiseProduct(v + 0.5 * dt * k1) + 0.5 * dt * k2;
    const double t = (n + 1) * dt;
    if ((n + 1) % options.sample_stride == 0 || n + 1 == steps) record(t);
    if (space.sup_norm(v) > options.blowup_ceiling) {
      traj.blew_up = true;
      break;
    }
  }
  traj.final_coeffs = v;
  return traj;
}

InstabilityReport instability_verdict(const Eigen::VectorXcd& u_coeffs, cdouble lambda,
                                      cdouble eta, double theta, double sigma,
                                      const GalerkinSpace& space,
                                      const VerdictOptions& options) {
  InstabilityReport report;
  const BranchParams bp = params_from_branch(lambda, eta, theta, sigma);
  const CGLParams& params = bp.params;
  const Eigen::VectorXcd u = bp.rescale * u_coeffs;

  const Eigen::VectorXcd spectrum = linear_spectrum_A(params, space);
  report.max_re_spectrum = max_real_part(spectrum);
  const double sup_u = space.sup_norm(u);
  report.spectrum_band = (sigma + 1.0) * std::pow(sup_u, sigma);
  report.spectrum_signal = report.max_re_spectrum > report.spectrum_band;

  // the instability argument needs an eigenvalue above the first one
  const Mode ones{Eigen::VectorXi::Ones(space.box().dim)};
  if (space.group().rational_part == eigenvalue_rational(ones, space.box())) {
    report.verdict = "first_eigenvalue_not_covered";
    return report;
  }

  double period;
  if (std::abs(params.omega) >= 1e-10) {
    const MonodromyResult mono = monodromy(u, params, space, options.monodromy);
    report.max_multiplier = mono.max_modulus;
    report.multipliers = mono.multipliers;
    period = params.period();
    report.floquet_rate = std::log(mono.max_modulus) / period;
    report.multiplier_signal = mono.max_modulus > 1.0 + 1e-9;
  } else {
    const Eigen::VectorXcd gen = autonomous_linearization_spectrum(u, params, space);
    report.floquet_rate = max_real_part(gen);
    report.max_multiplier = std::exp(report.floquet_rate);  // per unit time
    report.multipliers = gen;
    report.multiplier_signal = report.floquet_rate > 1e-9;
    period = 1.0;
  }

  // nonlinear confirmation: perturb, evolve, fit the deviation growth rate
  std::mt19937_64 rng(options.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd pert(space.mode_count());
  for (long m = 0; m < pert.size(); ++m) pert[m] = cdouble(gauss(rng), gauss(rng));
  pert *= options.perturbation * u.norm() / pert.norm();

  const double rate_guess = std::max(report.floquet_rate, 0.05);
  const double t_end =
      std::min(std::log(0.03 / options.perturbation) / rate_guess, 10.0 * period);
  SimOptions sim_options;
  sim_options.sample_stride = 4;
  const SimTrajectory traj = simulate_cgl(u + pert, params, space, t_end, u, sim_options);
  report.trajectory = traj;

  // least-squares slope of log d(t) inside the linear-growth window
  const double cap = 0.05 * u.norm();
  std::vector<double> ts, logd;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.orbit_distances[i] <= 0 || traj.orbit_distances[i] > cap) continue;
    ts.push_back(traj.times[i]);
    logd.push_back(std::log(traj.orbit_distances[i]));
  }
  if (ts.size() >= 8) {
    const size_t skip = ts.size() / 5;  // discard the transient
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = skip; i < ts.size(); ++i) {
      sx += ts[i];
      sy += logd[i];
      sxx += ts[i] * ts[i];
      sxy += ts[i] * logd[i];
      ++n;
    }
    report.measured_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report.growth_signal = std::abs(report.measured_rate - report.floquet_rate) <=
                           options.rate_tolerance * std::abs(report.floquet_rate);
  }

  report.verdict = (report.spectrum_signal && report.multiplier_signal && report.growth_signal)
                       ? "unstable"
                       : "inconclusive";
  return report;
}

}  // namespace bifurc

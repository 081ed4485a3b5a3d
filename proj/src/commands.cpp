#include "bifurc/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "bifurc/cgl.hpp"
#include "bifurc/contour.hpp"
#include "bifurc/disk.hpp"
#include "bifurc/errors.hpp"
#include "bifurc/reduction.hpp"

namespace bifurc {

namespace {

class Stopwatch {
public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

std::string config_hash(const RunConfig& config) { return fnv1a_hex(config.echo.dump()); }

void write_manifest(const RunConfig& config, const std::filesystem::path& out_dir,
                    const std::string& command, double ms, Json extra = Json::object()) {
  Json m = manifest_for(config, command, ms, config_hash(config));
  for (auto& [key, value] : extra.items()) m[key] = value;
  atomic_write(out_dir / (command + "_manifest.json"), m.dump(2) + "\n");
}

Json group_to_json(const EigenGroup& group) {
  Json j;
  j["eigenvalue"] = group.eigenvalue;
  j["rational_part"] = group.rational_part.str();
  j["multiplicity"] = group.multiplicity();
  Json modes = Json::array();
  for (const auto& m : group.modes) {
    Json k = Json::array();
    for (int i = 0; i < m.k.size(); ++i) k.push_back(m.k[i]);
    modes.push_back(k);
  }
  j["modes"] = modes;
  return j;
}

GalerkinSpace make_space(const RunConfig& config, const EigenGroup& group) {
  return GalerkinSpace(config.box, group, config.solver.galerkin_cutoff,
                       config.solver.galerkin_oversample);
}

std::string format_csv_row(const std::vector<double>& values) {
  std::string row;
  char buf[40];
  for (size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", values[i]);
    row += buf;
  }
  row += "\n";
  return row;
}

}  // namespace

Json run_spectrum(const RunConfig& config, const std::filesystem::path& out_dir) {
  Stopwatch watch;
  if (config.kind != DomainKind::Box)
    throw ConfigError("spectrum: only box domains have an enumerated spectrum");
  const auto groups = enumerate_groups(config.box, config.solver.spectrum_bound);
  Json result;
  result["spectrum_bound"] = config.solver.spectrum_bound;
  Json list = Json::array();
  for (const auto& g : groups) list.push_back(group_to_json(g));
  result["groups"] = list;
  atomic_write(out_dir / "spectrum.json", result.dump(2) + "\n");
  write_manifest(config, out_dir, "spectrum", watch.ms());
  return result;
}

Json run_seeds(const RunConfig& config, const std::filesystem::path& out_dir) {
  Stopwatch watch;
  Json result;
  if (config.kind == DomainKind::Disk) {
    const DiskSecondEigenpair pair(config.solver.disk_radial_nodes,
                                   config.solver.disk_angular_nodes);
    const ContinuumReport report = detect_continuum(pair);
    const DiskReducedSystem system(pair, config.sigma);
    MultistartOptions options = config.solver.multistart_options();
    options.grid.step = std::min(options.grid.step, 0.1);  // resolve the real family
    const MultistartSummary summary = multistart_solve(system, 0, options);

    result["domain"] = "disk";
    result["eigenvalue"] = pair.eigenvalue();
    result["continuum_detected"] = report.continuum_detected;
    result["continuum_suspected_by_multistart"] = summary.continuum_suspected;
    result["C_re"] = report.C.real();
    result["C_im"] = report.C.imag();
    result["max_structural_residual"] = report.max_structural_residual;
    result["max_real_abs_P"] = report.max_real_abs_P;
    result["jacobian_det_sample"] = report.jacobian_det_sample;
    result["count_available"] = false;
    result["note"] = report.continuum_detected
                         ? "real seeds form a continuum; nondegenerate branch construction "
                           "is not applicable"
                         : "no continuum detected";
    atomic_write(out_dir / "seeds.json", result.dump(2) + "\n");
    write_manifest(config, out_dir, "seeds", watch.ms());
    return result;
  }

  const EigenGroup group = config.resolve_group();
  const GroupMomentEvaluator moments(group, config.box, config.sigma, config.solver.quad_nodes);

  result["domain"] = "box";
  result["group"] = group_to_json(group);
  result["sigma"] = config.sigma;
  result["mode"] = config.seeds_mode;
  if (config.seeds_mode == "lead") {
    // every solution in the chart of the configured lead, no pinning
    if (config.lead > group.multiplicity())
      throw ConfigError("seeds: lead exceeds the group multiplicity");
    GroupReducedSystem system(moments, config.lead - 1);
    MultistartSummary summary =
        multistart_solve(system, 0, config.solver.multistart_options());
    Json seeds = Json::array();
    int real_count = 0;
    for (auto& seed : summary.seeds) {
      seed.alpha.lead = config.lead - 1;
      if (seed.is_real && seed.nondegenerate) ++real_count;
      seeds.push_back(seed_to_json(seed));
    }
    result["seeds"] = seeds;
    result["real_count"] = real_count;
    result["continuum_suspected"] = summary.continuum_suspected;
    result["starts"] = summary.starts;
    result["converged"] = summary.converged;
  } else {
    const BranchEnumeration enumeration =
        enumerate_branches(moments, config.solver.multistart_options());
    Json seeds = Json::array();
    for (const auto& seed : enumeration.seeds) seeds.push_back(seed_to_json(seed));
    result["seeds"] = seeds;
    result["real_count"] = enumeration.real_count;
    Json partition = Json::object();
    for (const auto& [nonzero, count] : enumeration.real_by_nonzero)
      partition[std::to_string(nonzero)] = count;
    result["real_by_nonzero"] = partition;
    result["continuum_suspected"] = enumeration.continuum_suspected;
    result["starts"] = enumeration.starts;
    result["converged"] = enumeration.converged;
  }
  atomic_write(out_dir / "seeds.json", result.dump(2) + "\n");
  write_manifest(config, out_dir, "seeds", watch.ms());
  return result;
}

Json run_branch(const RunConfig& config, const std::filesystem::path& out_dir, int seed_id,
                double eps_max_override) {
  Stopwatch watch;
  if (config.kind != DomainKind::Box)
    throw ConfigError("branch: tracing runs on box domains");
  const EigenGroup group = config.resolve_group();
  const GroupMomentEvaluator moments(group, config.box, config.sigma, config.solver.quad_nodes);

  SeedSolution seed;
  if (group.multiplicity() == 1) {
    seed.alpha.lead = 0;
    seed.nondegenerate = true;
    seed.is_real = true;
  } else {
    const BranchEnumeration enumeration =
        enumerate_branches(moments, config.solver.multistart_options());
    if (seed_id < 0 || seed_id >= static_cast<int>(enumeration.seeds.size()))
      throw ConfigError("branch: seed id out of range (have " +
                        std::to_string(enumeration.seeds.size()) + " seeds)");
    seed = enumeration.seeds[seed_id];
    if (!seed.nondegenerate)
      throw SolverError("branch: the selected seed is degenerate; no branch is constructed");
  }

  const GalerkinSpace space = make_space(config, group);
  double eps_max = eps_max_override > 0 ? eps_max_override : config.solver.eps_max;
  if (eps_max <= 0) eps_max = default_eps_max(space, config.sigma);

  const BranchTrace trace = trace_branch(seed.alpha, eps_max, config.solver.trace_steps, space,
                                         moments, config.eta, config.sigma);
  if (trace.samples.empty()) throw SolverError("branch: no sample converged");

  const int p = group.multiplicity();
  std::string csv = "eps,re_lambda,im_lambda";
  for (int i = 0; i < p - 1; ++i)
    csv += ",re_alpha" + std::to_string(i + 1) + ",im_alpha" + std::to_string(i + 1);
  csv += ",y_norm,pde_residual\n";
  for (const auto& sample : trace.samples) {
    std::vector<double> row = {sample.state.eps, sample.state.lambda.real(),
                               sample.state.lambda.imag()};
    for (int i = 0; i < p - 1; ++i) {
      row.push_back(sample.state.alpha.alpha[i].real());
      row.push_back(sample.state.alpha.alpha[i].imag());
    }
    row.push_back(sample.y_norm);
    row.push_back(sample.pde_residual);
    csv += format_csv_row(row);
  }
  atomic_write(out_dir / "branch.csv", csv);

  const BranchLimitReport limit = verify_branch_limit(trace.samples, space, moments);

  Json result;
  result["group"] = group_to_json(group);
  result["seed"] = seed_to_json(seed);
  result["eps_max"] = eps_max;
  result["steps"] = config.solver.trace_steps;
  result["completed"] = trace.completed;
  result["samples"] = trace.samples.size();
  result["final_lambda"] = complex_to_json(trace.samples.back().state.lambda);
  Json limit_json;
  Json alpha = Json::array();
  for (int i = 0; i < limit.alpha.alpha.size(); ++i)
    alpha.push_back(complex_to_json(limit.alpha.alpha[i]));
  limit_json["alpha"] = alpha;
  limit_json["p_norm"] = limit.p_norm;
  limit_json["lambda_rate_lhs"] = complex_to_json(limit.lambda_rate_lhs);
  limit_json["lambda_rate_rhs"] = complex_to_json(limit.lambda_rate_rhs);
  result["branch_limit"] = limit_json;
  atomic_write(out_dir / "branch_summary.json", result.dump(2) + "\n");
  write_manifest(config, out_dir, "branch", watch.ms(),
                 Json{{"seed_id", seed_id},
                      {"eps_max", eps_max},
                      {"seed", seed_to_json(seed)},
                      {"group", group_to_json(group)}});
  return result;
}

Json run_stability(const RunConfig& config, const std::filesystem::path& out_dir,
                   const std::filesystem::path& branch_csv) {
  Stopwatch watch;
  if (config.kind != DomainKind::Box)
    throw ConfigError("stability: analysis runs on box domains");

  std::ifstream in(branch_csv);
  if (!in) throw ConfigError("stability: cannot open branch file " + branch_csv.string());
  std::string line, last;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty()) throw ConfigError("stability: branch file has no samples");
  std::vector<double> fields;
  for (size_t pos = 0; pos != std::string::npos;) {
    const size_t next = last.find(',', pos);
    fields.push_back(std::stod(last.substr(pos, next - pos)));
    pos = next == std::string::npos ? next : next + 1;
  }

  const EigenGroup group = config.resolve_group();
  const int p = group.multiplicity();
  if (static_cast<int>(fields.size()) != 3 + 2 * (p - 1) + 2)
    throw ConfigError("stability: branch file does not match the configured group");
  const double eps = fields[0];
  const cdouble lambda_csv(fields[1], fields[2]);
  AlphaVector alpha;
  alpha.lead = config.lead - 1;
  alpha.alpha.resize(p - 1);
  for (int i = 0; i < p - 1; ++i)
    alpha.alpha[i] = cdouble(fields[3 + 2 * i], fields[4 + 2 * i]);

  const GroupMomentEvaluator moments(group, config.box, config.sigma, config.solver.quad_nodes);
  const GalerkinSpace space = make_space(config, group);
  const ReducedState state =
      solve_reduced(eps, alpha, lambda_csv, space, moments, config.eta, config.sigma);

  VerdictOptions options;
  options.monodromy.steps_per_period = config.solver.monodromy_steps;
  options.rng_seed = config.rng_seed;
  const InstabilityReport report = instability_verdict(
      state.field(space), state.lambda, config.eta, config.theta, config.sigma, space, options);

  Json result;
  result["verdict"] = report.verdict;
  result["eps"] = eps;
  result["lambda"] = complex_to_json(state.lambda);
  result["max_re_spectrum"] = report.max_re_spectrum;
  result["spectrum_band"] = report.spectrum_band;
  result["max_multiplier"] = report.max_multiplier;
  result["floquet_rate"] = report.floquet_rate;
  result["measured_rate"] = report.measured_rate;
  result["signals"] = Json{{"spectrum", report.spectrum_signal},
                           {"multiplier", report.multiplier_signal},
                           {"growth", report.growth_signal}};
  Json multipliers = Json::array();
  const int keep = std::min<int>(16, report.multipliers.size());
  for (int i = 0; i < keep; ++i) multipliers.push_back(complex_to_json(report.multipliers[i]));
  result["multipliers"] = multipliers;
  atomic_write(out_dir / "stability.json", result.dump(2) + "\n");

  std::string csv = "t,l2_norm,sup_norm,orbit_distance";
  for (int i = 0; i < p; ++i) csv += ",abs_kernel_mode" + std::to_string(i + 1);
  csv += "\n";
  for (size_t i = 0; i < report.trajectory.times.size(); ++i) {
    std::vector<double> row = {report.trajectory.times[i], report.trajectory.l2_norms[i],
                               report.trajectory.sup_norms[i],
                               report.trajectory.orbit_distances[i]};
    for (int m = 0; m < p; ++m) row.push_back(report.trajectory.kernel_mode_abs[i][m]);
    csv += format_csv_row(row);
  }
  atomic_write(out_dir / "trajectory.csv", csv);
  write_manifest(config, out_dir, "stability", watch.ms(),
                 Json{{"branch_file", branch_csv.string()}});
  return result;
}

Json run_nodal(const RunConfig& config, const std::filesystem::path& out_dir, int resolution) {
  Stopwatch watch;
  if (config.kind != DomainKind::Box) throw ConfigError("nodal: box domains only");
  if (resolution < 8) throw ConfigError("nodal: resolution must be >= 8");
  const int dim = config.box.dim;
  if (dim != 2 && dim != 3) throw ConfigError("nodal: need a 2-D box or a 3-D box with a slice");

  const EigenGroup group = config.resolve_group();
  const int p = group.multiplicity();
  std::vector<cdouble> coeffs = config.nodal_coefficients;
  if (coeffs.empty()) coeffs.assign(p, cdouble(1.0, 0.0));
  if (static_cast<int>(coeffs.size()) != p)
    throw ConfigError("nodal: coefficient count must match the group multiplicity");

  // strictly interior samples: the boundary is a trivial part of the zero set
  ContourGrid grid;
  grid.xs.resize(resolution);
  grid.ys.resize(resolution);
  for (int i = 0; i < resolution; ++i) {
    grid.xs[i] = config.box.lengths[0] * (i + 1.0) / (resolution + 1);
    grid.ys[i] = config.box.lengths[1] * (i + 1.0) / (resolution + 1);
  }
  grid.values.resize(resolution, resolution);
  double slice_z = 0;
  if (dim == 3) {
    if (config.nodal_slice < 0 || config.nodal_slice >= resolution)
      throw ConfigError("nodal: slice index out of range");
    slice_z = config.box.lengths[2] * (config.nodal_slice + 0.5) / resolution;
  }
  Eigen::VectorXd point(dim);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      point[0] = grid.xs[i];
      point[1] = grid.ys[j];
      if (dim == 3) point[2] = slice_z;
      cdouble v = 0;
      for (int m = 0; m < p; ++m)
        v += coeffs[m] * eval_eigenfunction(group.modes[m], config.box, point);
      grid.values(i, j) = v.real();
    }

  const auto curves = marching_squares(grid);
  atomic_write(out_dir / "nodal.svg",
               render_svg(curves, config.box.lengths[0], config.box.lengths[1]));
  atomic_write(out_dir / "nodal_grid.csv", grid_csv(grid));

  Json result;
  result["group"] = group_to_json(group);
  result["resolution"] = resolution;
  result["curves"] = curves.size();
  size_t points = 0;
  for (const auto& c : curves) points += c.size();
  result["curve_points"] = points;
  write_manifest(config, out_dir, "nodal", watch.ms(), Json{{"resolution", resolution}});
  return result;
}

Json run_h4(const RunConfig& config, const std::filesystem::path& out_dir) {
  Stopwatch watch;
  if (config.kind != DomainKind::Box) throw ConfigError("h4: box domains only");
  const EigenGroup group = config.resolve_group();
  const H4Report report = check_hypothesis_H4(group, config.box);
  const QuarticTable table = make_quartic_table(group, config.box);

  Json result;
  result["group"] = group_to_json(group);
  result["holds"] = report.holds;
  result["A"] = table.A;
  result["B"] = table.B;
  result["pair_uniform"] = table.pair_uniform;
  result["cross_ok"] = table.cross_ok;
  Json violations = Json::array();
  for (size_t v = 0; v < report.violations.size(); ++v) {
    const auto& [tuple, value] = report.violations[v];
    Json item;
    item["modes"] = Json::array({tuple[0], tuple[1], tuple[2], tuple[3]});
    item["value"] = value;
    if (v < 3) {
      // independent quadrature cross-check for the first few violations
      item["quadrature_value"] = quartic_product_quadrature(
          {group.modes[tuple[0]], group.modes[tuple[1]], group.modes[tuple[2]],
           group.modes[tuple[3]]},
          config.box, 24, /*normalized=*/false);
    }
    violations.push_back(item);
  }
  result["violations"] = violations;
  atomic_write(out_dir / "h4.json", result.dump(2) + "\n");
  write_manifest(config, out_dir, "h4", watch.ms());
  return result;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return 2;
  } catch (const SolverError&) {
    return 3;
  } catch (const QuadratureError&) {
    return 4;
  } catch (...) {
    return 1;
  }
}

}  // namespace bifurc

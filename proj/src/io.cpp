#include "bifurc/io.hpp"

#include <cstdio>
#include <fstream>

#include "bifurc/errors.hpp"

namespace bifurc {

MultistartOptions SolverConfig::multistart_options() const {
  MultistartOptions options;
  options.grid = multistart;
  options.newton_tol = newton_tol;
  options.max_iterations = max_iterations;
  options.dedup_tol = dedup_tol;
  options.degeneracy_tol = degeneracy_tol;
  return options;
}

namespace {

Rational parse_rational(const Json& j, const char* what) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  throw ConfigError(std::string(what) + ": expected a rational string \"p/q\" or an integer");
}

cdouble parse_complex(const Json& j, const char* what) {
  if (j.is_number()) return cdouble(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cdouble(j[0].get<double>(), j[1].get<double>());
  throw ConfigError(std::string(what) + ": expected a number or an [re, im] pair");
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig RunConfig::parse(const Json& doc) {
  RunConfig config;
  config.echo = doc;
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");

  if (!doc.contains("domain")) throw ConfigError("config: missing 'domain'");
  const Json& dom = doc.at("domain");
  const std::string type = get_or<std::string>(dom, "type", "box");
  if (type == "disk") {
    config.kind = DomainKind::Disk;
  } else if (type == "box" || type == "interval") {
    config.kind = DomainKind::Box;
    std::vector<Rational> lengths_sq;
    if (dom.contains("lengths_sq")) {
      for (const auto& item : dom.at("lengths_sq"))
        lengths_sq.push_back(parse_rational(item, "domain.lengths_sq"));
    } else if (type == "interval") {
      lengths_sq.push_back(Rational(1));
    } else {
      throw ConfigError("config: box domain needs 'lengths_sq'");
    }
    if (type == "interval" && lengths_sq.size() != 1)
      throw ConfigError("config: interval takes exactly one squared length");
    const std::string unit = get_or<std::string>(dom, "unit", "pi");
    if (unit != "pi" && unit != "one")
      throw ConfigError("config: domain.unit must be \"pi\" or \"one\"");
    config.box = BoxDomain::create(std::move(lengths_sq), unit == "pi");
  } else {
    throw ConfigError("config: domain.type must be box, interval or disk");
  }

  config.sigma = get_or<double>(doc, "sigma", 2.0);
  if (config.sigma < 1.0) throw ConfigError("config: sigma must be >= 1");
  if (doc.contains("eta")) config.eta = parse_complex(doc.at("eta"), "eta");
  if (config.eta == cdouble(0, 0)) throw ConfigError("config: eta must be nonzero");
  config.theta = get_or<double>(doc, "theta", 0.0);

  if (doc.contains("group")) {
    const Json& g = doc.at("group");
    config.group.index = get_or<int>(g, "index", 0);
    if (g.contains("eigenvalue"))
      config.group.eigenvalue = parse_rational(g.at("eigenvalue"), "group.eigenvalue");
    if (config.group.index == 0 && !config.group.eigenvalue)
      throw ConfigError("config: group needs 'index' or 'eigenvalue'");
  } else if (config.kind == DomainKind::Box) {
    config.group.index = 2;  // first candidate for a multiple eigenvalue
  }
  config.lead = get_or<int>(doc, "lead", 1);
  if (config.lead < 1) throw ConfigError("config: lead is 1-based");
  config.seeds_mode = get_or<std::string>(doc, "seeds_mode", config.seeds_mode);
  if (config.seeds_mode != "enumerate" && config.seeds_mode != "lead")
    throw ConfigError("config: seeds_mode must be \"enumerate\" or \"lead\"");

  if (doc.contains("solver")) {
    const Json& s = doc.at("solver");
    SolverConfig& sc = config.solver;
    sc.quad_nodes = get_or<int>(s, "quad_nodes", sc.quad_nodes);
    sc.galerkin_cutoff = get_or<int>(s, "galerkin_cutoff", sc.galerkin_cutoff);
    sc.galerkin_oversample = get_or<int>(s, "galerkin_oversample", sc.galerkin_oversample);
    sc.newton_tol = get_or<double>(s, "newton_tol", sc.newton_tol);
    sc.max_iterations = get_or<int>(s, "max_iterations", sc.max_iterations);
    sc.dedup_tol = get_or<double>(s, "dedup_tol", sc.dedup_tol);
    sc.degeneracy_tol = get_or<double>(s, "degeneracy_tol", sc.degeneracy_tol);
    sc.trace_steps = get_or<int>(s, "trace_steps", sc.trace_steps);
    sc.eps_max = get_or<double>(s, "eps_max", sc.eps_max);
    sc.monodromy_steps = get_or<int>(s, "monodromy_steps", sc.monodromy_steps);
    sc.spectrum_bound = get_or<double>(s, "spectrum_bound", sc.spectrum_bound);
    sc.disk_radial_nodes = get_or<int>(s, "disk_radial_nodes", sc.disk_radial_nodes);
    sc.disk_angular_nodes = get_or<int>(s, "disk_angular_nodes", sc.disk_angular_nodes);
    if (s.contains("multistart")) {
      const Json& m = s.at("multistart");
      StartGrid& grid = sc.multistart;
      grid.re_min = get_or<double>(m, "re_min", grid.re_min);
      grid.re_max = get_or<double>(m, "re_max", grid.re_max);
      grid.im_min = get_or<double>(m, "im_min", grid.im_min);
      grid.im_max = get_or<double>(m, "im_max", grid.im_max);
      grid.step = get_or<double>(m, "step", grid.step);
      grid.real_only = get_or<bool>(m, "real_only", grid.real_only);
      grid.jitter = get_or<double>(m, "jitter", grid.jitter);
    }
    for (const char* key : {"newton_tol", "dedup_tol", "degeneracy_tol"})
      if (s.contains(key) && s.at(key).get<double>() <= 0)
        throw ConfigError(std::string("config: solver.") + key + " must be > 0");
  }

  if (doc.contains("nodal")) {
    const Json& n = doc.at("nodal");
    if (n.contains("coefficients"))
      for (const auto& item : n.at("coefficients"))
        config.nodal_coefficients.push_back(parse_complex(item, "nodal.coefficients"));
    config.nodal_slice = get_or<int>(n, "slice_index", 0);
  }

  config.output_dir = get_or<std::string>(doc, "output_dir", config.output_dir);
  config.rng_seed = get_or<std::uint64_t>(doc, "rng_seed", config.rng_seed);
  config.solver.multistart.rng_seed = config.rng_seed;
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  Json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse(doc);
}

EigenGroup RunConfig::resolve_group() const {
  if (kind != DomainKind::Box)
    throw ConfigError("resolve_group: only box domains carry an enumerated spectrum");
  double bound = solver.spectrum_bound;
  for (int attempt = 0; attempt < 12; ++attempt) {
    const auto groups = enumerate_groups(box, bound);
    if (group.eigenvalue) {
      for (const auto& g : groups)
        if (g.rational_part == *group.eigenvalue) return g;
    } else if (group.index >= 1 && group.index <= static_cast<int>(groups.size())) {
      return groups[group.index - 1];
    }
    bound *= 2;
  }
  throw ConfigError("resolve_group: requested group not found below the spectrum bound");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

Json manifest_for(const RunConfig& config, const std::string& command, double timing_ms,
                  const std::string& input_hash) {
  Json m;
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  m["input_hash"] = input_hash;
  m["timing_ms"] = timing_ms;
  m["config"] = config.echo;
  return m;
}

Json complex_to_json(cdouble z) { return Json::array({z.real(), z.imag()}); }

cdouble complex_from_json(const Json& j) {
  return cdouble(j.at(0).get<double>(), j.at(1).get<double>());
}

Json seed_to_json(const SeedSolution& seed) {
  Json j;
  j["lead"] = seed.alpha.lead + 1;  // 1-based externally
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < seed.alpha.alpha.size(); ++i) {
    re.push_back(seed.alpha.alpha[i].real());
    im.push_back(seed.alpha.alpha[i].imag());
  }
  j["alpha_re"] = re;
  j["alpha_im"] = im;
  j["residual"] = seed.residual;
  j["jacobian_det"] = seed.jacobian_det;
  j["nondegenerate"] = seed.nondegenerate;
  j["is_real"] = seed.is_real;
  return j;
}

SeedSolution seed_from_json(const Json& j) {
  SeedSolution seed;
  seed.alpha.lead = j.at("lead").get<int>() - 1;
  const auto& re = j.at("alpha_re");
  const auto& im = j.at("alpha_im");
  seed.alpha.alpha.resize(re.size());
  for (size_t i = 0; i < re.size(); ++i)
    seed.alpha.alpha[i] = cdouble(re[i].get<double>(), im[i].get<double>());
  seed.residual = j.at("residual").get<double>();
  seed.jacobian_det = j.at("jacobian_det").get<double>();
  seed.nondegenerate = j.at("nondegenerate").get<bool>();
  seed.is_real = j.at("is_real").get<bool>();
  return seed;
}

}  // namespace bifurc

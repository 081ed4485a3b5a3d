// Run configuration, result serialization, and atomic file output.
#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "bifurc/alpha_system.hpp"
#include "bifurc/box.hpp"

namespace bifurc {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

enum class DomainKind { Box, Disk };

struct GroupSelector {
  int index = 0;                      // 1-based index among sorted groups; 0 = unset
  std::optional<Rational> eigenvalue; // exact rational part, alternative selector
};

struct SolverConfig {
  int quad_nodes = 0;  // 0: dimension default
  int galerkin_cutoff = 24;
  int galerkin_oversample = 4;
  StartGrid multistart;
  double newton_tol = 1e-10;
  int max_iterations = 40;
  double dedup_tol = 1e-6;
  double degeneracy_tol = 1e-8;
  int trace_steps = 10;
  double eps_max = 0;  // 0: 0.2 * gap^{1/sigma}
  int monodromy_steps = 2048;
  double spectrum_bound = 10.0;
  int disk_radial_nodes = 128;
  int disk_angular_nodes = 256;

  MultistartOptions multistart_options() const;
};

struct RunConfig {
  DomainKind kind = DomainKind::Box;
  BoxDomain box;  // valid when kind == Box
  double sigma = 2.0;
  cdouble eta{1.0, 0.0};
  double theta = 0.0;
  GroupSelector group;
  int lead = 1;                      // 1-based lead basis index
  std::string seeds_mode = "enumerate";  // "enumerate" (lead iteration) | "lead" (fixed chart)
  SolverConfig solver;
  std::vector<cdouble> nodal_coefficients;
  int nodal_slice = 0;
  std::string output_dir = ".";
  std::uint64_t rng_seed = 1234;

  Json echo;  // the parsed document, for manifests

  static RunConfig parse(const Json& doc);
  static RunConfig load(const std::filesystem::path& path);

  /// Resolves the configured eigenvalue group on the box domain.
  EigenGroup resolve_group() const;
};

/// FNV-1a hash of a byte string, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

/// Writes via a temp file in the same directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

Json manifest_for(const RunConfig& config, const std::string& command, double timing_ms,
                  const std::string& input_hash);

Json seed_to_json(const SeedSolution& seed);
SeedSolution seed_from_json(const Json& j);

Json complex_to_json(cdouble z);
cdouble complex_from_json(const Json& j);

}  // namespace bifurc

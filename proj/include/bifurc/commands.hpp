// Command front ends: each runs one pipeline stage, writes its result files
// under the output directory, and returns a summary document.
#pragma once

#include <filesystem>

#include "bifurc/io.hpp"

namespace bifurc {

Json run_spectrum(const RunConfig& config, const std::filesystem::path& out_dir);
Json run_seeds(const RunConfig& config, const std::filesystem::path& out_dir);
Json run_branch(const RunConfig& config, const std::filesystem::path& out_dir, int seed_id,
                double eps_max_override = 0);
Json run_stability(const RunConfig& config, const std::filesystem::path& out_dir,
                   const std::filesystem::path& branch_csv);
Json run_nodal(const RunConfig& config, const std::filesystem::path& out_dir, int resolution);
Json run_h4(const RunConfig& config, const std::filesystem::path& out_dir);

/// Exit-code policy: 0 success, 2 config error, 3 solver non-convergence,
/// 4 quadrature guard.
int exit_code_for_current_exception();

}  // namespace bifurc

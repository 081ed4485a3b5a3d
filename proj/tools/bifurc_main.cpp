// Command-line front end: bifurcation seeds, branch continuation, stability
// verdicts, nodal figures and spectrum tables from a single JSON config.
#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "bifurc/commands.hpp"
#include "bifurc/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bifurc: bound-state bifurcation branches and their stability"};

  std::string config_path;
  std::string out_dir;
  std::string cmd;
  int seed_id = 0;
  double eps_max = 0;
  int resolution = 256;
  std::string branch_file;

  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (default: config output_dir)");
  app.add_option("--cmd", cmd, "command to run")
      ->required()
      ->check(CLI::IsMember({"spectrum", "seeds", "branch", "stability", "nodal", "h4"}));
  app.add_option("--seed-id", seed_id, "seed index for --cmd branch (0-based)");
  app.add_option("--eps-max", eps_max, "continuation ceiling for --cmd branch");
  app.add_option("--resolution", resolution, "grid resolution for --cmd nodal");
  app.add_option("--branch-file", branch_file, "branch CSV for --cmd stability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const bifurc::RunConfig config = bifurc::RunConfig::load(config_path);
    const std::filesystem::path out = out_dir.empty() ? config.output_dir : out_dir;

    bifurc::Json summary;
    if (cmd == "spectrum") {
      summary = bifurc::run_spectrum(config, out);
    } else if (cmd == "seeds") {
      summary = bifurc::run_seeds(config, out);
    } else if (cmd == "branch") {
      summary = bifurc::run_branch(config, out, seed_id, eps_max);
    } else if (cmd == "stability") {
      if (branch_file.empty()) throw bifurc::ConfigError("--cmd stability needs --branch-file");
      summary = bifurc::run_stability(config, out, branch_file);
    } else if (cmd == "nodal") {
      summary = bifurc::run_nodal(config, out, resolution);
    } else if (cmd == "h4") {
      summary = bifurc::run_h4(config, out);
    }
    std::printf("%s\n", summary.dump(2).c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bifurc %s: %s\n", cmd.c_str(), e.what());
    return bifurc::exit_code_for_current_exception();
  }
}

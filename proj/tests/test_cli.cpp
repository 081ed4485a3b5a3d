#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bifurc/commands.hpp"
#include "bifurc/errors.hpp"

using namespace bifurc;
namespace fs = std::filesystem;

namespace {

Json square_config() {
  return Json{{"domain", Json{{"type", "box"}, {"lengths_sq", Json::array({"1", "1"})},
                              {"unit", "pi"}}},
              {"sigma", 2.0},
              {"eta", Json::array({1.0, 0.0})},
              {"group", Json{{"index", 2}}},
              {"solver", Json{{"spectrum_bound", 11.0}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("bifurc_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config validation rejects malformed documents") {
  CHECK_THROWS_AS(RunConfig::parse(Json{{"domain", Json{{"type", "torus"}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse(Json{{"domain", Json{{"type", "box"}}}}), ConfigError);

  Json bad_rational = square_config();
  bad_rational["domain"]["lengths_sq"] = Json::array({"sqrt(2)", "1"});
  CHECK_THROWS_AS(RunConfig::parse(bad_rational), ConfigError);

  Json bad_sigma = square_config();
  bad_sigma["sigma"] = 0.5;
  CHECK_THROWS_AS(RunConfig::parse(bad_sigma), ConfigError);

  Json bad_eta = square_config();
  bad_eta["eta"] = Json::array({0.0, 0.0});
  CHECK_THROWS_AS(RunConfig::parse(bad_eta), ConfigError);

  Json bad_unit = square_config();
  bad_unit["domain"]["unit"] = "furlong";
  CHECK_THROWS_AS(RunConfig::parse(bad_unit), ConfigError);
}

TEST_CASE("group selection by index and by exact eigenvalue") {
  RunConfig by_index = RunConfig::parse(square_config());
  CHECK(by_index.resolve_group().multiplicity() == 2);

  Json doc = square_config();
  doc["group"] = Json{{"eigenvalue", "5"}};
  RunConfig by_value = RunConfig::parse(doc);
  CHECK(by_value.resolve_group().eigenvalue == doctest::Approx(5.0));

  doc["group"] = Json{{"eigenvalue", "7/3"}};
  CHECK_THROWS_AS(RunConfig::parse(doc).resolve_group(), ConfigError);
}

TEST_CASE("interval sugar builds a one-dimensional pi box") {
  const RunConfig config = RunConfig::parse(Json{{"domain", Json{{"type", "interval"}}}});
  CHECK(config.box.dim == 1);
  CHECK(config.box.lengths[0] == doctest::Approx(3.14159265358979).epsilon(1e-12));
}

TEST_CASE("identical configs give byte-identical results") {
  const RunConfig config = RunConfig::parse(square_config());
  TempDir a("det_a"), b("det_b");
  run_seeds(config, a.path);
  run_seeds(config, b.path);
  CHECK(slurp(a.path / "seeds.json") == slurp(b.path / "seeds.json"));

  // manifests agree up to the timing field
  Json ma = Json::parse(slurp(a.path / "seeds_manifest.json"));
  Json mb = Json::parse(slurp(b.path / "seeds_manifest.json"));
  ma.erase("timing_ms");
  mb.erase("timing_ms");
  CHECK(ma == mb);

  Json doc = square_config();
  doc["nodal"] = Json{{"coefficients",
                       Json::array({Json::array({1.0, 0.0}), Json::array({1.0, 0.0})})}};
  const RunConfig nodal_config = RunConfig::parse(doc);
  run_nodal(nodal_config, a.path, 64);
  run_nodal(nodal_config, b.path, 64);
  CHECK(slurp(a.path / "nodal.svg") == slurp(b.path / "nodal.svg"));
  CHECK(slurp(a.path / "nodal_grid.csv") == slurp(b.path / "nodal_grid.csv"));
}

TEST_CASE("emitted seeds re-ingest without loss") {
  const RunConfig config = RunConfig::parse(square_config());
  TempDir dir("roundtrip");
  const Json result = run_seeds(config, dir.path);
  const Json recovered = Json::parse(slurp(dir.path / "seeds.json"));
  CHECK(recovered == result);
  for (const auto& sj : recovered.at("seeds")) {
    const SeedSolution seed = seed_from_json(sj);
    CHECK(seed_to_json(seed) == sj);
  }
}

TEST_CASE("exit codes map the error taxonomy") {
  auto code_for = [](auto&& thrower) {
    try {
      thrower();
    } catch (...) {
      return exit_code_for_current_exception();
    }
    return 0;
  };
  CHECK(code_for([] { throw ConfigError("x"); }) == 2);
  CHECK(code_for([] { throw SolverError("x"); }) == 3);
  CHECK(code_for([] { throw QuadratureError("x"); }) == 4);
  CHECK(code_for([] { throw std::runtime_error("x"); }) == 1);
}

TEST_CASE("nodal command validates resolution and writes svg + csv") {
  Json doc = square_config();
  doc["nodal"] = Json{{"coefficients", Json::array({Json::array({1.0, 0.0}),
                                                    Json::array({1.0, 0.0})})}};
  const RunConfig config = RunConfig::parse(doc);
  TempDir dir("nodal");
  CHECK_THROWS_AS(run_nodal(config, dir.path, 4), ConfigError);
  const Json result = run_nodal(config, dir.path, 64);
  CHECK(result.at("curves").get<int>() == 1);  // the diagonal nodal line
  CHECK(fs::exists(dir.path / "nodal.svg"));
  CHECK(fs::exists(dir.path / "nodal_grid.csv"));

  // zero field: valid empty picture
  Json zero = doc;
  zero["nodal"]["coefficients"] = Json::array({Json::array({0.0, 0.0}), Json::array({0.0, 0.0})});
  const Json empty_result = run_nodal(RunConfig::parse(zero), dir.path, 32);
  CHECK(empty_result.at("curves").get<int>() == 0);
  CHECK(slurp(dir.path / "nodal.svg").find("</svg>") != std::string::npos);
}

TEST_CASE("nodal slices through a three-dimensional box") {
  Json doc = {{"domain", Json{{"type", "box"}, {"lengths_sq", Json::array({"1", "1", "1"})},
                              {"unit", "pi"}}},
              {"group", Json{{"eigenvalue", "6"}}},
              {"solver", Json{{"spectrum_bound", 7.0}}},
              {"nodal", Json{{"coefficients",
                              Json::array({Json::array({1.0, 0.0}), Json::array({1.0, 0.0}),
                                           Json::array({1.0, 0.0})})},
                             {"slice_index", 16}}}};
  const RunConfig config = RunConfig::parse(doc);
  TempDir dir("nodal3d");
  const Json result = run_nodal(config, dir.path, 48);
  CHECK(result.at("curves").get<int>() >= 1);
  CHECK(fs::exists(dir.path / "nodal.svg"));

  Json bad = doc;
  bad["nodal"]["slice_index"] = 99;
  CHECK_THROWS_AS(run_nodal(RunConfig::parse(bad), dir.path, 48), ConfigError);
}

TEST_CASE("stability command rejects missing or mismatched branch files") {
  const RunConfig config = RunConfig::parse(square_config());
  TempDir dir("stab");
  CHECK_THROWS_AS(run_stability(config, dir.path, dir.path / "missing.csv"), ConfigError);
  atomic_write(dir.path / "bad.csv", "eps,re_lambda\n");
  CHECK_THROWS_AS(run_stability(config, dir.path, dir.path / "bad.csv"), ConfigError);
}

TEST_CASE("spectrum command lists the square groups below the bound") {
  Json doc = square_config();
  doc["solver"]["spectrum_bound"] = 10.0;
  TempDir dir("spectrum");
  const Json result = run_spectrum(RunConfig::parse(doc), dir.path);
  const auto& groups = result.at("groups");
  REQUIRE(groups.size() == 4);
  const double eigenvalues[] = {2, 5, 8, 10};
  const int multiplicities[] = {1, 2, 1, 2};
  for (int i = 0; i < 4; ++i) {
    CHECK(groups[i].at("eigenvalue").get<double>() == doctest::Approx(eigenvalues[i]));
    CHECK(groups[i].at("multiplicity").get<int>() == multiplicities[i]);
  }
}

TEST_CASE("branch and stability run end to end through files") {
  Json doc = {{"domain", Json{{"type", "interval"}}},
              {"sigma", 2.0},
              {"eta", Json::array({-1.0, 0.0})},
              {"theta", 0.3},
              {"group", Json{{"eigenvalue", "4"}}},
              {"solver", Json{{"spectrum_bound", 30.0},
                              {"galerkin_cutoff", 12},
                              {"trace_steps", 3},
                              {"eps_max", 0.02},
                              {"monodromy_steps", 512}}}};
  const RunConfig config = RunConfig::parse(doc);
  TempDir dir("pipeline");
  const Json branch = run_branch(config, dir.path, 0, 0.0);
  CHECK(branch.at("completed").get<bool>());
  REQUIRE(fs::exists(dir.path / "branch.csv"));
  const Json verdict = run_stability(config, dir.path, dir.path / "branch.csv");
  CHECK(verdict.at("verdict").get<std::string>() == "unstable");
  CHECK(fs::exists(dir.path / "stability.json"));
  CHECK(fs::exists(dir.path / "trajectory.csv"));
  const std::string traj = slurp(dir.path / "trajectory.csv");
  CHECK(traj.rfind("t,l2_norm,sup_norm,orbit_distance", 0) == 0);
}

TEST_CASE("hashing and atomic writes behave") {
  CHECK(fnv1a_hex("abc") == fnv1a_hex("abc"));
  CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
  TempDir dir("atomic");
  atomic_write(dir.path / "f.txt", "payload");
  CHECK(slurp(dir.path / "f.txt") == "payload");
  CHECK_FALSE(fs::exists(dir.path / "f.txt.tmp"));
}

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "chemotax/commands.hpp"
#include "chemotax/error.hpp"

using namespace chemotax;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "grid": {"lo": [-0.5, -0.5, -0.5], "hi": [0.5, 0.5, 0.5], "n": [9, 9, 9]},
  "params": {"chi": 0.0, "alpha": 1, "beta": 1, "gamma": 1, "delta": 1, "mu": 1, "tau": 1},
  "solver": {"dt": 1e-4, "t_end": 1e-3},
  "initial": {
    "u": {"kind": "gaussian", "amplitude": 2.0, "rate": 3.0},
    "v": {"kind": "constant", "value": 1.0},
    "w": {"kind": "gaussian", "amplitude": 0.5, "rate": 1.0}
  },
  "output": {"directory": "ignored", "snapshot_stride": 5}
})";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("chemotax_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(CHEMOTAX_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string edited(const std::string& key, const nlohmann::json& value) {
  auto j = nlohmann::json::parse(kSmall);
  j[nlohmann::json::json_pointer(key)] = value;
  return j.dump();
}

}  // namespace

TEST_CASE("shipped blow-up config") {
  const RunConfig c = parse_config(fs::path(CHEMOTAX_CONFIG_DIR) / "cube_blowup.json");
  CHECK(c.params.chi == 2.0);
  CHECK(c.params.tau == 1);
  CHECK(c.solver.dt == 1e-6);
  CHECK(c.grid.n == std::array<std::size_t, 3>{101, 101, 101});
  CHECK(c.u0.kind == FieldSource::Kind::gaussian);
  CHECK(c.u0.amplitude == 1000.0);
  CHECK(c.w0.rate == 800.0);
  CHECK(parse_config(fs::path(CHEMOTAX_CONFIG_DIR) / "cube_elliptic.json").params.tau == 0);
}

TEST_CASE("config defaults and errors") {
  auto j = nlohmann::json::parse(kSmall);
  j.erase("solver");
  j.erase("output");
  const RunConfig c = parse_config_text(j.dump());
  CHECK(c.solver == SolverConfig{});
  CHECK(c.solver.cg_tol == 1e-10);
  CHECK(c.solver.newton_tol == 1e-10);
  CHECK(c.solver.blowup_threshold == 1e9);
  CHECK(c.snapshot_stride == 1);

  auto path_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  CHECK(path_of(edited("/params/tau", 2)) == "params.tau");
  CHECK(path_of(edited("/params/beta", 0)) == "params.beta");
  CHECK(path_of(edited("/params/chii", 1)) == "params.chii");
  CHECK(path_of(edited("/grid/n", nlohmann::json::array({9, 2, 9}))) == "grid.n[1]");
  CHECK(path_of(edited("/initial/u/kind", "spline")) == "initial.u.kind");
  CHECK(path_of(edited("/solver/dt", "small")) == "solver.dt");
  CHECK(path_of(edited("/output/snapshot_format", "hdf5")) == "output.snapshot_format");
  auto missing = nlohmann::json::parse(kSmall);
  missing["initial"].erase("w");
  CHECK(path_of(missing.dump()) == "initial.w");
  CHECK_THROWS_AS(parse_config_text("{ // no comments\n}"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[1, 2]"), ConfigError);
}

TEST_CASE("config round trip") {
  RunConfig c = parse_config_text(kSmall);
  c.solver.record_stride = 3;
  c.solver.blowup_threshold = 1.0 / 3.0;
  c.snapshot_format = SnapshotFormat::raw;
  c.w0 = {FieldSource::Kind::file, 0, 0, 0, "w0.bin"};
  CHECK(parse_config_text(serialize(c)) == c);
}

TEST_CASE("file initial data") {
  const fs::path dir = scratch("file_data");
  RunConfig c = parse_config_text(edited("/initial/v", {{"kind", "file"}, {"path", "v0.bin"}}), dir);
  auto g = make_grid(c.grid);
  std::vector<double> vals(g->size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = 0.001 * static_cast<double>(i);
  std::ofstream(dir / "v0.bin", std::ios::binary)
      .write(reinterpret_cast<const char*>(vals.data()), static_cast<std::streamsize>(vals.size() * 8));
  const InitialData d = build_initial_data(c, g);
  CHECK(std::equal(vals.begin(), vals.end(), d.v0.values().begin(), d.v0.values().end()));
  std::ofstream(dir / "v0.bin", std::ios::binary) << "short";
  CHECK_THROWS_AS(build_initial_data(c, g), ConfigError);
}

TEST_CASE("simulate writes outputs") {
  const fs::path dir = scratch("simulate");
  const fs::path cfg = write_config(dir, kSmall);
  REQUIRE(run("simulate " + cfg.string() + " --output-dir " + (dir / "a").string(), dir / "log") == 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(summary["termination"] == "completed");
  CHECK(summary["blowup_detected"] == false);
  CHECK(summary["steps"] == 10);
  CHECK(summary["max_relative_mass_drift"].get<double>() < 1e-12);
  CHECK(fs::exists(dir / "a" / "snapshots" / "u_000005.vtk"));
  CHECK(fs::exists(dir / "a" / "snapshots" / "w_000010.vtk"));
  const std::string vtk = slurp(dir / "a" / "snapshots" / "v_000000.vtk");
  CHECK(vtk.find("DATASET STRUCTURED_POINTS") != std::string::npos);
  CHECK(vtk.find("DIMENSIONS 9 9 9") != std::string::npos);

  // Same config, different thread count and environment overrides: same bytes.
  const std::string env = "CHEMOTAX_OUTPUT_DIR=" + (dir / "b").string() + " CHEMOTAX_THREADS=3 ";
  REQUIRE(std::system((env + CHEMOTAX_CLI + " simulate " + cfg.string() + " > /dev/null").c_str()) == 0);
  CHECK(slurp(dir / "a" / "diagnostics.csv") == slurp(dir / "b" / "diagnostics.csv"));
  CHECK(run("--isa scalar simulate " + cfg.string() + " --output-dir " + (dir / "c").string(), dir / "log") == 0);
  CHECK(slurp(dir / "a" / "diagnostics.csv") == slurp(dir / "c" / "diagnostics.csv"));
}

TEST_CASE("simulate failure paths") {
  const fs::path dir = scratch("failures");
  const fs::path cfg = write_config(dir, kSmall);
  std::ofstream(dir / "blocker") << "x";
  CHECK(run("simulate " + cfg.string() + " --output-dir " + (dir / "blocker" / "out").string(), dir / "log") != 0);
  CHECK(run("simulate " + (dir / "missing.json").string(), dir / "log") == kExitConfig);
  CHECK(run("simulate " + write_config(dir, edited("/params/tau", 2)).string(), dir / "log") == kExitConfig);
  CHECK(slurp(dir / "log").find("params.tau") != std::string::npos);
  CHECK(run("frobnicate", dir / "log") == kExitConfig);

  // A CG budget of one iteration cannot reach the tolerance.
  const fs::path bad = write_config(dir, edited("/solver/cg_maxiter", 1));
  CHECK(run("simulate " + bad.string() + " --output-dir " + (dir / "o").string(), dir / "log") == kExitSolver);
}

TEST_CASE("bound command") {
  const fs::path dir = scratch("bound");
  auto j = nlohmann::json::parse(kSmall);
  j["params"]["chi"] = 2.0;
  j["initial"]["w"] = {{"kind", "gaussian"}, {"amplitude", 800.0}, {"rate", 800.0}};
  const fs::path cfg = write_config(dir, j.dump());
  REQUIRE(run("bound " + cfg.string() + " --output-dir " + dir.string(), dir / "log") == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "bound.json"));
  CHECK(report["rho"] == 0.5);
  CHECK(report["scriptC"] == 2560003.0);
  CHECK(report["t_lower"].get<double>() > 0);
  CHECK(report["parameters"]["M2"] == 800.0);

  j["params"]["tau"] = 0;
  REQUIRE(run("bound " + write_config(dir, j.dump()).string() + " --output-dir " + dir.string(), dir / "log") == 0);
  const auto r0 = nlohmann::json::parse(slurp(dir / "bound.json"));
  CHECK(r0["tau"] == 0);
  CHECK(r0["scriptB"] == r0["A1"]);

  j["grid"]["lo"] = {0, 0, 0};
  j["grid"]["hi"] = {1, 1, 1};
  CHECK(run("bound " + write_config(dir, j.dump()).string() + " --output-dir " + dir.string(), dir / "log") == kExitGeometry);
}

TEST_CASE("certify command") {
  const fs::path dir = scratch("certify");
  const fs::path blowup = fs::path(CHEMOTAX_CONFIG_DIR) / "cube_smoke.json";
  CHECK(run("certify " + blowup.string(), dir / "log") == 0);
  std::string out = slurp(dir / "log");
  CHECK(out.find("certificate: FAIL") != std::string::npos);
  CHECK(out.find("K: 1600\n") != std::string::npos);

  auto j = nlohmann::json::parse(slurp(blowup));
  j["params"]["tau"] = 0;
  CHECK(run("certify " + write_config(dir, j.dump()).string(), dir / "log") == 0);
  CHECK(slurp(dir / "log").find("certificate: PASS") != std::string::npos);

  j = nlohmann::json::parse(kSmall);
  j["params"]["chi"] = 1e-3;
  j["initial"]["u"] = {{"kind", "constant"}, {"value", 1.0}};
  j["initial"]["w"] = {{"kind", "constant"}, {"value", 1.0}};
  CHECK(run("certify " + write_config(dir, j.dump()).string(), dir / "log") == 0);
  out = slurp(dir / "log");
  CHECK(out.find("certificate: PASS") != std::string::npos);
  const auto pos = out.find("identity_max: ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(out.substr(pos + 14)) < 1e-8);

  CHECK(run("phi-check --p 2 --eps 0.5 --K 0.5", dir / "log") == 0);
  CHECK(slurp(dir / "log").find("condition: PASS") != std::string::npos);
  CHECK(run("phi-check --p 2 --eps 0.5", dir / "log") == kExitConfig);
}

#include "chemotax/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chemotax/error.hpp"

namespace chemotax {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ConfigError(join(path, item.key()), "unknown key");
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
  const std::string p = join(path, key);
  if (!parent.contains(key)) throw ConfigError(p, "missing required key");
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(p, "expected an object");
  return v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
  return d;
}

long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<long>();
}

void read_number(const json& obj, const char* key, const std::string& path, double& out,
                 bool required) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(join(path, key), "missing required key");
    return;
  }
  out = number(obj.at(key), join(path, key));
}

void read_int(const json& obj, const char* key, const std::string& path, int& out,
              bool required) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(join(path, key), "missing required key");
    return;
  }
  out = static_cast<int>(integer(obj.at(key), join(path, key)));
}

Vec3 read_vec3(const json& obj, const char* key, const std::string& path) {
  const std::string p = join(path, key);
  if (!obj.contains(key)) throw ConfigError(p, "missing required key");
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(p, "expected an array of 3 numbers");
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = number(v[a], p + "[" + std::to_string(a) + "]");
  return out;
}

GridSpec parse_grid(const json& obj, const std::string& path) {
  reject_unknown(obj, path, {"lo", "hi", "n"});
  GridSpec g;
  g.lo = read_vec3(obj, "lo", path);
  g.hi = read_vec3(obj, "hi", path);
  const std::string np = join(path, "n");
  if (!obj.contains("n")) throw ConfigError(np, "missing required key");
  const json& n = obj.at("n");
  if (!n.is_array() || n.size() != 3) throw ConfigError(np, "expected an array of 3 integers");
  for (int a = 0; a < 3; ++a) {
    const std::string ap = np + "[" + std::to_string(a) + "]";
    const long v = integer(n[a], ap);
    if (v < 3) throw ConfigError(ap, "needs at least 3 nodes");
    g.n[a] = static_cast<std::size_t>(v);
  }
  for (int a = 0; a < 3; ++a)
    if (!(g.hi[a] > g.lo[a]))
      throw ConfigError(join(path, "hi") + "[" + std::to_string(a) + "]", "must exceed lo");
  return g;
}

ModelParams parse_params(const json& obj, const std::string& path) {
  reject_unknown(obj, path, {"chi", "alpha", "beta", "gamma", "delta", "mu", "tau"});
  ModelParams m;
  read_number(obj, "chi", path, m.chi, true);
  if (m.chi < 0.0) throw ConfigError(join(path, "chi"), "must be >= 0");
  struct Named {
    const char* key;
    double* dst;
  };
  for (Named n : {Named{"alpha", &m.alpha}, Named{"beta", &m.beta}, Named{"gamma", &m.gamma},
                  Named{"delta", &m.delta}, Named{"mu", &m.mu}}) {
    read_number(obj, n.key, path, *n.dst, true);
    if (!(*n.dst > 0.0)) throw ConfigError(join(path, n.key), "must be > 0");
  }
  read_int(obj, "tau", path, m.tau, true);
  if (m.tau != 0 && m.tau != 1) throw ConfigError(join(path, "tau"), "must be 0 or 1");
  return m;
}

SolverConfig parse_solver(const json& obj, const std::string& path) {
  reject_unknown(obj, path,
                 {"dt", "t_end", "cg_tol", "cg_maxiter", "newton_tol", "newton_maxiter",
                  "blowup_threshold", "cfl_warn", "record_stride"});
  SolverConfig s;
  read_number(obj, "dt", path, s.dt, false);
  read_number(obj, "t_end", path, s.t_end, false);
  read_number(obj, "cg_tol", path, s.cg_tol, false);
  read_int(obj, "cg_maxiter", path, s.cg_maxiter, false);
  read_number(obj, "newton_tol", path, s.newton_tol, false);
  read_int(obj, "newton_maxiter", path, s.newton_maxiter, false);
  read_number(obj, "blowup_threshold", path, s.blowup_threshold, false);
  read_int(obj, "record_stride", path, s.record_stride, false);
  if (obj.contains("cfl_warn")) {
    if (!obj.at("cfl_warn").is_boolean())
      throw ConfigError(join(path, "cfl_warn"), "expected a boolean");
    s.cfl_warn = obj.at("cfl_warn").get<bool>();
  }
  if (!(s.dt > 0.0)) throw ConfigError(join(path, "dt"), "must be > 0");
  if (!(s.t_end >= 0.0)) throw ConfigError(join(path, "t_end"), "must be >= 0");
  if (!(s.cg_tol > 0.0 && s.cg_tol < 1.0)) throw ConfigError(join(path, "cg_tol"), "must lie in (0, 1)");
  if (!(s.newton_tol > 0.0 && s.newton_tol < 1.0))
    throw ConfigError(join(path, "newton_tol"), "must lie in (0, 1)");
  if (s.cg_maxiter < 1) throw ConfigError(join(path, "cg_maxiter"), "must be >= 1");
  if (s.newton_maxiter < 1) throw ConfigError(join(path, "newton_maxiter"), "must be >= 1");
  if (!(s.blowup_threshold > 0.0))
    throw ConfigError(join(path, "blowup_threshold"), "must be > 0");
  if (s.record_stride < 1) throw ConfigError(join(path, "record_stride"), "must be >= 1");
  return s;
}

FieldSource parse_source(const json& parent, const char* key, const std::string& path) {
  const std::string p = join(path, key);
  const json& obj = object_at(parent, key, path);
  if (!obj.contains("kind")) throw ConfigError(join(p, "kind"), "missing required key");
  if (!obj.at("kind").is_string()) throw ConfigError(join(p, "kind"), "expected a string");
  const std::string kind = obj.at("kind").get<std::string>();
  FieldSource s;
  if (kind == "gaussian") {
    reject_unknown(obj, p, {"kind", "amplitude", "rate"});
    s.kind = FieldSource::Kind::gaussian;
    read_number(obj, "amplitude", p, s.amplitude, true);
    read_number(obj, "rate", p, s.rate, true);
    if (s.amplitude < 0.0) throw ConfigError(join(p, "amplitude"), "must be >= 0");
    if (!(s.rate > 0.0)) throw ConfigError(join(p, "rate"), "must be > 0");
  } else if (kind == "constant") {
    reject_unknown(obj, p, {"kind", "value"});
    s.kind = FieldSource::Kind::constant;
    read_number(obj, "value", p, s.value, true);
    if (s.value < 0.0) throw ConfigError(join(p, "value"), "must be >= 0");
  } else if (kind == "file") {
    reject_unknown(obj, p, {"kind", "path"});
    s.kind = FieldSource::Kind::file;
    if (!obj.contains("path") || !obj.at("path").is_string())
      throw ConfigError(join(p, "path"), "expected a string");
    s.path = obj.at("path").get<std::string>();
  } else {
    throw ConfigError(join(p, "kind"), "must be one of gaussian, constant, file");
  }
  return s;
}

json source_json(const FieldSource& s) {
  switch (s.kind) {
    case FieldSource::Kind::gaussian:
      return {{"kind", "gaussian"}, {"amplitude", s.amplitude}, {"rate", s.rate}};
    case FieldSource::Kind::constant:
      return {{"kind", "constant"}, {"value", s.value}};
    case FieldSource::Kind::file:
      return {{"kind", "file"}, {"path", s.path}};
  }
  return {};
}

ScalarField load_raw(const std::filesystem::path& path, const GridPtr& grid,
                     const std::string& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(key, "cannot open " + path.string());
  std::vector<double> values(grid->size());
  std::vector<unsigned char> bytes(values.size() * 8);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size() || in.peek() != EOF)
    throw ConfigError(key, path.string() + " does not hold exactly " +
                               std::to_string(values.size()) + " float64 values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[8 * i + b];
    std::memcpy(&values[i], &bits, 8);
  }
  return ScalarField(grid, std::move(values));
}

ScalarField build_field(const FieldSource& s, const GridPtr& grid,
                        const std::filesystem::path& base, const std::string& key) {
  switch (s.kind) {
    case FieldSource::Kind::gaussian:
      return gaussian_data(grid, s.amplitude, s.rate);
    case FieldSource::Kind::constant:
      return ScalarField(grid, s.value);
    case FieldSource::Kind::file: {
      std::filesystem::path p = s.path;
      if (p.is_relative() && !base.empty()) p = base / p;
      return load_raw(p, grid, key);
    }
  }
  return ScalarField(grid);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("", "top level must be an object");
  reject_unknown(root, "", {"grid", "params", "solver", "initial", "output"});

  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.grid = parse_grid(object_at(root, "grid", ""), "grid");
  cfg.params = parse_params(object_at(root, "params", ""), "params");
  if (root.contains("solver")) cfg.solver = parse_solver(object_at(root, "solver", ""), "solver");

  const json& init = object_at(root, "initial", "");
  reject_unknown(init, "initial", {"u", "v", "w"});
  cfg.u0 = parse_source(init, "u", "initial");
  cfg.v0 = parse_source(init, "v", "initial");
  cfg.w0 = parse_source(init, "w", "initial");

  if (root.contains("output")) {
    const json& out = object_at(root, "output", "");
    reject_unknown(out, "output", {"directory", "snapshot_stride", "snapshot_format"});
    if (out.contains("directory")) {
      if (!out.at("directory").is_string() || out.at("directory").get<std::string>().empty())
        throw ConfigError("output.directory", "expected a non-empty string");
      cfg.output_dir = out.at("directory").get<std::string>();
    }
    read_int(out, "snapshot_stride", "output", cfg.snapshot_stride, false);
    if (cfg.snapshot_stride < 0) throw ConfigError("output.snapshot_stride", "must be >= 0");
    if (out.contains("snapshot_format")) {
      const json& f = out.at("snapshot_format");
      if (f == "vtk")
        cfg.snapshot_format = SnapshotFormat::vtk;
      else if (f == "raw")
        cfg.snapshot_format = SnapshotFormat::raw;
      else
        throw ConfigError("output.snapshot_format", "must be \"vtk\" or \"raw\"");
    }
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

std::string serialize(const RunConfig& cfg) {
  json grid = {{"lo", cfg.grid.lo}, {"hi", cfg.grid.hi}, {"n", cfg.grid.n}};
  const ModelParams& m = cfg.params;
  json params = {{"chi", m.chi},     {"alpha", m.alpha}, {"beta", m.beta}, {"gamma", m.gamma},
                 {"delta", m.delta}, {"mu", m.mu},       {"tau", m.tau}};
  const SolverConfig& s = cfg.solver;
  json solver = {{"dt", s.dt},
                 {"t_end", s.t_end},
                 {"cg_tol", s.cg_tol},
                 {"cg_maxiter", s.cg_maxiter},
                 {"newton_tol", s.newton_tol},
                 {"newton_maxiter", s.newton_maxiter},
                 {"blowup_threshold", s.blowup_threshold},
                 {"cfl_warn", s.cfl_warn},
                 {"record_stride", s.record_stride}};
  json initial = {{"u", source_json(cfg.u0)}, {"v", source_json(cfg.v0)}, {"w", source_json(cfg.w0)}};
  json output = {{"directory", cfg.output_dir},
                 {"snapshot_stride", cfg.snapshot_stride},
                 {"snapshot_format", cfg.snapshot_format == SnapshotFormat::vtk ? "vtk" : "raw"}};
  json root = {{"grid", grid},       {"params", params}, {"solver", solver},
               {"initial", initial}, {"output", output}};
  return root.dump(2) + "\n";
}

InitialData build_initial_data(const RunConfig& cfg, const GridPtr& grid) {
  InitialData d{build_field(cfg.u0, grid, cfg.base_dir, "initial.u"),
                build_field(cfg.v0, grid, cfg.base_dir, "initial.v"),
                build_field(cfg.w0, grid, cfg.base_dir, "initial.w")};
  return d;
}

}  // namespace chemotax

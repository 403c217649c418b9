#pragma once

#include <filesystem>
#include <string>

#include "chemotax/grid.hpp"
#include "chemotax/model.hpp"
#include "chemotax/output.hpp"
#include "chemotax/solver.hpp"

namespace chemotax {

/// How one initial field is produced.
///   gaussian: amplitude * exp(-rate |x|^2)
///   constant: value everywhere
///   file:     raw little-endian float64, x fastest, one value per node
struct FieldSource {
  enum class Kind { gaussian, constant, file };
  Kind kind = Kind::constant;
  double amplitude = 0.0;
  double rate = 0.0;
  double value = 0.0;
  std::string path;

  friend bool operator==(const FieldSource&, const FieldSource&) = default;
};

struct RunConfig {
  GridSpec grid;
  ModelParams params;
  SolverConfig solver;
  FieldSource u0;
  FieldSource v0;
  FieldSource w0;
  std::string output_dir = "output";
  int snapshot_stride = 1;  // 0 disables snapshots
  SnapshotFormat snapshot_format = SnapshotFormat::vtk;
  std::filesystem::path base_dir;  // relative file sources resolve against this

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.grid == b.grid && a.params == b.params && a.solver == b.solver && a.u0 == b.u0 &&
           a.v0 == b.v0 && a.w0 == b.w0 && a.output_dir == b.output_dir &&
           a.snapshot_stride == b.snapshot_stride && a.snapshot_format == b.snapshot_format;
  }
};

/// Parses and validates a JSON config. Unknown keys are rejected; every
/// error is a ConfigError naming the key path (e.g. "params.tau").
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

/// JSON text that parses back to an equal RunConfig.
std::string serialize(const RunConfig& cfg);

/// Samples the three initial fields on `grid`.
InitialData build_initial_data(const RunConfig& cfg, const GridPtr& grid);

}  // namespace chemotax

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chemotax/grid.hpp"
#include "chemotax/state.hpp"

namespace chemotax {

/// Minimal streaming JSON writer. Keys keep insertion order and reals are
/// printed with 17 significant digits (non-finite reals become null).
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double v);
  JsonWriter& value(long v);
  JsonWriter& value(int v) { return value(static_cast<long>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();

  template <class T>
  JsonWriter& field(std::string_view k, T v) {
    key(k);
    return value(v);
  }

  const std::string& str() const noexcept { return out_; }

 private:
  void before_value();
  void newline();
  void append_string(std::string_view v);

  std::string out_;
  std::vector<bool> first_;  // one entry per open object
  bool after_key_ = false;
};

std::string format_real(double v);

/// Creates `dir` (and parents); throws IoError if it cannot be written.
void ensure_directory(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view text);

/// VTK legacy ASCII, STRUCTURED_POINTS with POINT_DATA scalars.
void write_vtk(const std::filesystem::path& path, const ScalarField& f, std::string_view name);

/// Raw little-endian float64 (x fastest) plus `<path>.json` describing the grid.
void write_raw(const std::filesystem::path& path, const ScalarField& f, std::string_view name,
               double t, long step);

enum class SnapshotFormat { vtk, raw };

/// Writes u, v and w of `state` into `dir` as <field>_<step>.<vtk|bin>.
void write_snapshot(const std::filesystem::path& dir, const SimState& state, SnapshotFormat fmt);

}  // namespace chemotax

#include "chemotax/output.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <system_error>

#include "chemotax/error.hpp"

namespace chemotax {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * first_.size(), ' ');
}

void JsonWriter::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.empty()) throw InvalidArgument("JsonWriter: value inside object needs a key");
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) newline();
  out_ += '}';
  if (first_.empty()) out_ += '\n';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  if (!first_.back()) out_ += ',';
  first_.back() = false;
  newline();
  append_string(k);
  out_ += ": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  before_value();
  out_ += std::isfinite(v) ? format_real(v) : "null";
  return *this;
}

JsonWriter& JsonWriter::value(long v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  before_value();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
  before_value();
  append_string(v);
  return *this;
}

void JsonWriter::append_string(std::string_view v) {
  out_ += '"';
  for (char c : v) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out_ += buf;
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_vtk(const std::filesystem::path& path, const ScalarField& f, std::string_view name) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path.string() + " for writing");
  const Grid& g = f.grid();
  const std::string nm(name);
  std::fprintf(fp, "# vtk DataFile Version 3.0\n%s\nASCII\nDATASET STRUCTURED_POINTS\n",
               nm.c_str());
  std::fprintf(fp, "DIMENSIONS %zu %zu %zu\n", g.n(0), g.n(1), g.n(2));
  std::fprintf(fp, "ORIGIN %.17g %.17g %.17g\n", g.spec().lo[0], g.spec().lo[1], g.spec().lo[2]);
  std::fprintf(fp, "SPACING %.17g %.17g %.17g\n", g.h(0), g.h(1), g.h(2));
  std::fprintf(fp, "POINT_DATA %zu\nSCALARS %s double 1\nLOOKUP_TABLE default\n", g.size(),
               nm.c_str());
  for (std::size_t i = 0; i < f.size(); ++i) std::fprintf(fp, "%.17g\n", f[i]);
  const bool bad = std::ferror(fp) != 0;
  if (std::fclose(fp) != 0 || bad) throw IoError("write failed: " + path.string());
}

void write_raw(const std::filesystem::path& path, const ScalarField& f, std::string_view name,
               double t, long step) {
  std::vector<unsigned char> bytes(f.size() * 8);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::uint64_t bits;
    const double v = f[i];
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  write_text(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));

  const Grid& g = f.grid();
  JsonWriter j;
  j.begin_object();
  j.field("field", name);
  j.field("step", step);
  j.field("t", t);
  j.field("dtype", "float64");
  j.field("byte_order", "little");
  j.field("layout", "x-fastest");
  for (int a = 0; a < 3; ++a) {
    const char* axis = a == 0 ? "x" : a == 1 ? "y" : "z";
    j.key(std::string("n") + axis).value(static_cast<long>(g.n(a)));
    j.key(std::string("lo_") + axis).value(g.spec().lo[a]);
    j.key(std::string("hi_") + axis).value(g.spec().hi[a]);
  }
  j.end_object();
  std::filesystem::path sidecar = path;
  sidecar += ".json";
  write_text(sidecar, j.str());
}

void write_snapshot(const std::filesystem::path& dir, const SimState& state, SnapshotFormat fmt) {
  char step[32];
  std::snprintf(step, sizeof step, "%06ld", state.step);
  const char* ext = fmt == SnapshotFormat::vtk ? ".vtk" : ".bin";
  const std::pair<const char*, const ScalarField*> fields[] = {
      {"u", &state.u}, {"v", &state.v}, {"w", &state.w}};
  for (const auto& [name, f] : fields) {
    const std::filesystem::path p = dir / (std::string(name) + "_" + step + ext);
    if (fmt == SnapshotFormat::vtk)
      write_vtk(p, *f, name);
    else
      write_raw(p, *f, name, state.t, state.step);
  }
}

}  // namespace chemotax

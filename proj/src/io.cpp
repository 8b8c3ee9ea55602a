#include "horizon/io.hpp"

#include "horizon/common.hpp"
#include "horizon/config.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

namespace horizon {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), os_(path, std::ios::binary), columns_(header.size()) {
  if (!os_) throw Error("cannot open " + path.string() + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("csv row width differs from the header in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i];
  }
  os_ << '\n';
}

void CsvWriter::close() {
  os_.close();
  if (!os_) throw Error("failed writing " + path_.string());
}

std::string num(double x) { return format_double(x); }
std::string num(long x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }
std::string num(bool x) { return x ? "1" : "0"; }

void write_snapshot(const std::filesystem::path& path, int nx, int ny, double t, const std::vector<double>& values) {
  if (static_cast<long>(values.size()) != static_cast<long>(nx) * ny) {
    throw Error("snapshot size does not match " + std::to_string(nx) + "x" + std::to_string(ny));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const std::int32_t dims[2]{nx, ny};
  os.write("HZSNAP01", 8);
  os.write(reinterpret_cast<const char*>(dims), sizeof dims);
  os.write(reinterpret_cast<const char*>(&t), sizeof t);
  os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!os) throw Error("failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  char tag[8];
  std::int32_t dims[2];
  Snapshot s;
  is.read(tag, 8);
  if (!is || std::memcmp(tag, "HZSNAP01", 8) != 0) throw Error(path.string() + " is not a snapshot file");
  is.read(reinterpret_cast<char*>(dims), sizeof dims);
  is.read(reinterpret_cast<char*>(&s.t), sizeof s.t);
  if (!is || dims[0] < 1 || dims[1] < 1) throw Error(path.string() + ": bad snapshot header");
  s.nx = dims[0];
  s.ny = dims[1];
  s.values.resize(static_cast<std::size_t>(s.nx) * s.ny);
  is.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
  if (!is) throw Error(path.string() + ": truncated snapshot");
  return s;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw Error("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create directory " + dir.string());
}

}  // namespace horizon

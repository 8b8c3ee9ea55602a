#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace horizon {

// Comma-separated, header row, LF endings; numbers go through format_double.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream os_;
  std::size_t columns_;
};

std::string num(double x);  // 17 significant digits
std::string num(long x);
std::string num(int x);
std::string num(bool x);

// Snapshot file: 8-byte tag "HZSNAP01", int32 nx, int32 ny, float64 t, then
// nx * ny float64 values, all little-endian.
void write_snapshot(const std::filesystem::path& path, int nx, int ny, double t, const std::vector<double>& values);

struct Snapshot {
  int nx = 0;
  int ny = 0;
  double t = 0.0;
  std::vector<double> values;
};

Snapshot read_snapshot(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Creates the directory and any parents; throws Error when that fails.
void ensure_dir(const std::filesystem::path& dir);

}  // namespace horizon

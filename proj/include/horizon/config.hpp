#pragma once

#include "horizon/geometry.hpp"
#include "horizon/hawking.hpp"
#include "horizon/lensing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace horizon {

enum class Command { spectrum, hawking, lens, sweep, validate };
std::string to_string(Command c);
std::optional<Command> command_from_string(const std::string& s);

// Band structure and cone analysis of one uniform tilt.
struct SpectrumConfig {
  Dimensionality dim = Dimensionality::grid2d;
  double t_x = 1.0;
  double t_y = 1.0;
  double t_z = 1.0;
  double beta = -8.0;
  double a = 1.0;
  double vx = 0.0;
  double vy = 0.0;
  int points = 201;         // samples of the path k = s d, s in [-pi, pi]
  double dir_x = 1.0;       // path direction d, normalized on use
  double dir_y = 0.0;
  int scan_resolution = 64;

  bool operator==(const SpectrumConfig&) const = default;
  LatticeSpec lattice() const;
  void validate() const;
};

struct ValidateConfig {
  int grid = 16;
  int k_points = 5;  // per direction
  int scan_resolution = 64;

  bool operator==(const ValidateConfig&) const = default;
  void validate() const;
};

struct ExperimentConfig {
  Command command = Command::validate;
  std::string out = "out";
  int threads = 1;
  int stride = 0;  // extra snapshot every stride samples
  SpectrumConfig spectrum;
  HawkingConfig hawking;
  LensingConfig lens;
  LensSweepConfig sweep;
  ValidateConfig checks;

  bool operator==(const ExperimentConfig&) const = default;
};

// Error with the 1-based line (0 when the value came from a default) and
// the key it concerns.
class ConfigError : public Error {
 public:
  ConfigError(int line, std::string key, const std::string& message);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

// Line-oriented "key = value" text with [section] headers and # comments.
// Sections: run, spectrum, hawking, lens, sweep, validate. A command given
// here must agree with one passed by the caller; one of them is required.
ExperimentConfig parse_config(const std::string& text, std::optional<Command> command = std::nullopt);

// Every key of every section, numbers with 17 significant digits.
std::string serialize(const ExperimentConfig& cfg);

std::string format_double(double x);

}  // namespace horizon

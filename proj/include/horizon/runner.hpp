#pragma once

#include "horizon/config.hpp"

#include <iosfwd>

namespace horizon {

inline constexpr const char* version = "0.3.0";

// Dispatches to the experiment for cfg.command and writes its artifacts into
// cfg.out. CSV and snapshot files depend only on the configuration; timings
// go to metadata.json alone. Returns 0 on success, 1 when an experiment
// completed but a check or validity test failed. Throws on errors.
int run(const ExperimentConfig& cfg, std::ostream& log);

// Writes error.json into the output directory when possible.
void write_error_record(const ExperimentConfig* cfg, const std::string& type, const std::string& message);

}  // namespace horizon

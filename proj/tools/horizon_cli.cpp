// Command-line entry: one subcommand per experiment, config file optional.
#include "horizon/config.hpp"
#include "horizon/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw horizon::Error("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int fail(const horizon::ExperimentConfig* cfg, const std::string& type, const std::string& message,
         nlohmann::json extra = nlohmann::json::object()) {
  horizon::write_error_record(cfg, type, message);
  nlohmann::json j{{"status", "error"}, {"type", type}, {"message", message}};
  j.update(extra);
  std::cerr << j.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tilted-cone lattice experiments around analogue horizons"};
  app.set_version_flag("--version", std::string(horizon::version));
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  int threads = 1;
  int stride = -1;
  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "band structure along a k-space line"},
      {"hawking", "horizon tunneling sweep over packet frequency"},
      {"lens", "one packet passing a funnel hole"},
      {"sweep", "lensing runs over gamma and impact parameter"},
      {"validate", "model checks against closed-form Bloch results"}};
  for (const auto& [name, about] : commands) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--stride", stride, "extra snapshot every K samples (0 disables)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(nullptr, "usage", e.what());
  }

  const std::string name = app.get_subcommands().front()->get_name();
  horizon::ExperimentConfig cfg;
  try {
    const std::string text = config_path.empty() ? std::string() : slurp(config_path);
    cfg = horizon::parse_config(text, horizon::command_from_string(name));
    if (!out.empty()) cfg.out = out;
    cfg.threads = threads;
    if (stride >= 0) {
      cfg.stride = stride;
      cfg.hawking.snapshot_stride = stride;
      cfg.lens.snapshot_stride = stride;
    }
  } catch (const horizon::ConfigError& e) {
    return fail(nullptr, "config", e.what(), {{"line", e.line()}, {"key", e.key()}});
  } catch (const horizon::Error& e) {
    return fail(nullptr, "config", e.what());
  }

  try {
    return horizon::run(cfg, std::cout);
  } catch (const horizon::Error& e) {
    return fail(&cfg, "experiment", e.what());
  } catch (const std::exception& e) {
    return fail(&cfg, "internal", e.what());
  }
}

#include "horizon/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace horizon {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Thrown by value parsers; the caller attaches line and key.
struct BadValue {
  std::string why;
};

double to_double(const std::string& s) {
  double x = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(x)) throw BadValue{"expected a finite number"};
  return x;
}

int to_int(const std::string& s) {
  int x = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e) throw BadValue{"expected an integer"};
  return x;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw BadValue{"expected true or false"};
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

struct Key {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

using Section = std::vector<std::pair<std::string, Key>>;

template <class Sub>
Key dbl(Sub ExperimentConfig::*sub, double Sub::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { (c.*sub).*field = to_double(v); },
          [=](const ExperimentConfig& c) { return format_double((c.*sub).*field); }};
}

template <class Sub>
Key integer(Sub ExperimentConfig::*sub, int Sub::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { (c.*sub).*field = to_int(v); },
          [=](const ExperimentConfig& c) { return std::to_string((c.*sub).*field); }};
}

template <class Sub>
Key boolean(Sub ExperimentConfig::*sub, bool Sub::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { (c.*sub).*field = to_bool(v); },
          [=](const ExperimentConfig& c) { return std::string((c.*sub).*field ? "true" : "false"); }};
}

template <class Sub>
Key list(Sub ExperimentConfig::*sub, std::vector<double> Sub::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { (c.*sub).*field = to_list(v); },
          [=](const ExperimentConfig& c) { return from_list((c.*sub).*field); }};
}

Key plateau(double PlateauRule::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { c.hawking.plateau.*field = to_double(v); },
          [=](const ExperimentConfig& c) { return format_double(c.hawking.plateau.*field); }};
}

const std::vector<std::pair<std::string, Section>>& schema() {
  using E = ExperimentConfig;
  static const std::vector<std::pair<std::string, Section>> s{
      {"run",
       {{"command",
         {[](E& c, const std::string& v) {
            const auto cmd = command_from_string(v);
            if (!cmd) throw BadValue{"expected spectrum, hawking, lens, sweep or validate"};
            c.command = *cmd;
          },
          [](const E& c) { return to_string(c.command); }}},
        {"out", {[](E& c, const std::string& v) {
                   if (v.empty()) throw BadValue{"expected a directory"};
                   c.out = v;
                 },
                 [](const E& c) { return c.out; }}},
        {"threads", {[](E& c, const std::string& v) { c.threads = to_int(v); },
                     [](const E& c) { return std::to_string(c.threads); }}},
        {"stride", {[](E& c, const std::string& v) { c.stride = to_int(v); },
                    [](const E& c) { return std::to_string(c.stride); }}}}},
      {"spectrum",
       {{"dim",
         {[](E& c, const std::string& v) {
            if (v == "chain1d") c.spectrum.dim = Dimensionality::chain1d;
            else if (v == "grid2d") c.spectrum.dim = Dimensionality::grid2d;
            else throw BadValue{"expected chain1d or grid2d"};
          },
          [](const E& c) { return to_string(c.spectrum.dim); }}},
        {"t_x", dbl(&E::spectrum, &SpectrumConfig::t_x)},
        {"t_y", dbl(&E::spectrum, &SpectrumConfig::t_y)},
        {"t_z", dbl(&E::spectrum, &SpectrumConfig::t_z)},
        {"beta", dbl(&E::spectrum, &SpectrumConfig::beta)},
        {"a", dbl(&E::spectrum, &SpectrumConfig::a)},
        {"vx", dbl(&E::spectrum, &SpectrumConfig::vx)},
        {"vy", dbl(&E::spectrum, &SpectrumConfig::vy)},
        {"points", integer(&E::spectrum, &SpectrumConfig::points)},
        {"dir_x", dbl(&E::spectrum, &SpectrumConfig::dir_x)},
        {"dir_y", dbl(&E::spectrum, &SpectrumConfig::dir_y)},
        {"scan_resolution", integer(&E::spectrum, &SpectrumConfig::scan_resolution)}}},
      {"hawking",
       {{"n_left", integer(&E::hawking, &HawkingConfig::n_left)},
        {"n_mid", integer(&E::hawking, &HawkingConfig::n_mid)},
        {"n_right", integer(&E::hawking, &HawkingConfig::n_right)},
        {"gamma_t", dbl(&E::hawking, &HawkingConfig::gamma_t)},
        {"x0", dbl(&E::hawking, &HawkingConfig::x0)},
        {"sigma", dbl(&E::hawking, &HawkingConfig::sigma)},
        {"t_x", dbl(&E::hawking, &HawkingConfig::t_x)},
        {"t_z", dbl(&E::hawking, &HawkingConfig::t_z)},
        {"a", dbl(&E::hawking, &HawkingConfig::a)},
        {"dt_classical", dbl(&E::hawking, &HawkingConfig::dt_classical)},
        {"dt_quantum", dbl(&E::hawking, &HawkingConfig::dt_quantum)},
        {"t_end", dbl(&E::hawking, &HawkingConfig::t_end)},
        {"snapshot_times", list(&E::hawking, &HawkingConfig::snapshot_times)},
        {"omegas", list(&E::hawking, &HawkingConfig::omegas)},
        {"which",
         {[](E& c, const std::string& v) {
            if (v == "classical") c.hawking.which = Which::classical;
            else if (v == "quantum") c.hawking.which = Which::quantum;
            else if (v == "both") c.hawking.which = Which::both;
            else throw BadValue{"expected classical, quantum or both"};
          },
          [](const E& c) { return to_string(c.hawking.which); }}},
        {"plateau_sample", plateau(&PlateauRule::sample)},
        {"plateau_window", plateau(&PlateauRule::window)},
        {"plateau_span", plateau(&PlateauRule::span)},
        {"plateau_rel_change", plateau(&PlateauRule::rel_change)},
        {"plateau_floor", plateau(&PlateauRule::floor)}}},
      {"lens",
       {{"nx", integer(&E::lens, &LensingConfig::nx)},
        {"ny", integer(&E::lens, &LensingConfig::ny)},
        {"gamma", dbl(&E::lens, &LensingConfig::gamma)},
        {"b", dbl(&E::lens, &LensingConfig::b)},
        {"side", integer(&E::lens, &LensingConfig::side)},
        {"cx", dbl(&E::lens, &LensingConfig::cx)},
        {"x0", dbl(&E::lens, &LensingConfig::x0)},
        {"sigma", dbl(&E::lens, &LensingConfig::sigma)},
        {"k0", dbl(&E::lens, &LensingConfig::k0)},
        {"t_x", dbl(&E::lens, &LensingConfig::t_x)},
        {"t_y", dbl(&E::lens, &LensingConfig::t_y)},
        {"t_z", dbl(&E::lens, &LensingConfig::t_z)},
        {"r_cap", dbl(&E::lens, &LensingConfig::r_cap)},
        {"dt", dbl(&E::lens, &LensingConfig::dt)},
        {"t_end", dbl(&E::lens, &LensingConfig::t_end)},
        {"sample", dbl(&E::lens, &LensingConfig::sample)},
        {"pre_window", dbl(&E::lens, &LensingConfig::pre_window)},
        {"post_window", dbl(&E::lens, &LensingConfig::post_window)},
        {"snapshot_times", list(&E::lens, &LensingConfig::snapshot_times)}}},
      {"sweep",
       {{"gammas", list(&E::sweep, &LensSweepConfig::gammas)},
        {"bs", list(&E::sweep, &LensSweepConfig::bs)},
        {"gamma_for_b", dbl(&E::sweep, &LensSweepConfig::gamma_for_b)},
        {"b_for_gamma", dbl(&E::sweep, &LensSweepConfig::b_for_gamma)},
        {"straight", boolean(&E::sweep, &LensSweepConfig::straight)},
        {"mirror", boolean(&E::sweep, &LensSweepConfig::mirror)}}},
      {"validate",
       {{"grid", integer(&E::checks, &ValidateConfig::grid)},
        {"k_points", integer(&E::checks, &ValidateConfig::k_points)},
        {"scan_resolution", integer(&E::checks, &ValidateConfig::scan_resolution)}}},
  };
  return s;
}

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& [sec, keys] : schema()) {
    if (sec != section) continue;
    for (const auto& [k, key] : keys) {
      if (k == name) return &key;
    }
  }
  return nullptr;
}

bool known_section(const std::string& section) {
  for (const auto& entry : schema()) {
    if (entry.first == section) return true;
  }
  return false;
}

std::string fail_field(const char* section, const char* key, const char* why) {
  return std::string(section) + ": " + key + " " + why;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::hawking: return "hawking";
    case Command::lens: return "lens";
    case Command::sweep: return "sweep";
    case Command::validate: return "validate";
  }
  return "?";
}

std::optional<Command> command_from_string(const std::string& s) {
  for (Command c : {Command::spectrum, Command::hawking, Command::lens, Command::sweep, Command::validate}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

LatticeSpec SpectrumConfig::lattice() const {
  LatticeSpec s = dim == Dimensionality::chain1d ? LatticeSpec::chain(1) : LatticeSpec::grid(1, 1);
  s.t_x = t_x;
  s.t_y = t_y;
  s.t_z = t_z;
  s.beta = beta;
  s.a = a;
  return s;
}

void SpectrumConfig::validate() const {
  auto fail = [](const char* key, const char* why) { throw FieldError(key, fail_field("spectrum", key, why)); };
  if (!(t_z > 0)) fail("t_z", "must be positive");
  if (!(a > 0)) fail("a", "must be positive");
  if (points < 2) fail("points", "must be at least 2");
  if (!(std::hypot(dir_x, dir_y) > 0)) fail("dir_x", "path direction must be non-zero");
  if (dim == Dimensionality::chain1d && (vy != 0 || dir_y != 0)) fail("vy", "must be zero on a chain");
  if (scan_resolution < 2) fail("scan_resolution", "must be at least 2");
}

void ValidateConfig::validate() const {
  auto fail = [](const char* key, const char* why) { throw FieldError(key, fail_field("validate", key, why)); };
  if (grid < 3) fail("grid", "must be at least 3");
  if (k_points < 1) fail("k_points", "must be positive");
  if (scan_resolution < 2) fail("scan_resolution", "must be at least 2");
}

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : Error(line > 0 ? "config line " + std::to_string(line) + (key.empty() ? "" : ", key " + key) + ": " + message
                     : "config" + (key.empty() ? std::string() : " key " + key) + ": " + message),
      line_(line), key_(std::move(key)) {}

ExperimentConfig parse_config(const std::string& text, std::optional<Command> command) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;  // "section.key" -> line
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "", "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!known_section(section)) throw ConfigError(line, "", "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "", "missing key before =");
    if (section.empty()) throw ConfigError(line, key, "key outside any section");
    const Key* k = find_key(section, key);
    if (!k) throw ConfigError(line, key, "unknown key in [" + section + "]");
    const std::string full = section + "." + key;
    if (seen.count(full)) {
      throw ConfigError(line, key, "duplicate key, first set on line " + std::to_string(seen[full]));
    }
    seen[full] = line;
    try {
      k->set(cfg, value);
    } catch (const BadValue& e) {
      throw ConfigError(line, key, e.why + ", got '" + value + "'");
    }
  }

  if (seen.count("run.command")) {
    if (command && *command != cfg.command) {
      throw ConfigError(seen["run.command"], "command",
                        "file asks for " + to_string(cfg.command) + " but " + to_string(*command) + " was requested");
    }
  } else if (command) {
    cfg.command = *command;
  } else {
    throw ConfigError(0, "command", "missing required key [run] command");
  }

  auto line_of = [&](const std::string& sec, const std::string& key) {
    const auto it = seen.find(sec + "." + key);
    return it == seen.end() ? 0 : it->second;
  };
  if (cfg.threads < 1) throw ConfigError(line_of("run", "threads"), "threads", "must be at least 1");
  if (cfg.stride < 0) throw ConfigError(line_of("run", "stride"), "stride", "must be non-negative");
  cfg.hawking.snapshot_stride = cfg.stride;
  cfg.lens.snapshot_stride = cfg.stride;

  auto check = [&](const char* sec, const std::function<void()>& validate) {
    try {
      validate();
    } catch (const FieldError& e) {
      const std::string sec_name = e.field() == "stride" ? "run" : sec;
      throw ConfigError(line_of(sec_name, e.field()), e.field(), e.what());
    }
  };
  check("spectrum", [&] { cfg.spectrum.validate(); });
  check("hawking", [&] { cfg.hawking.validate(); });
  check("lens", [&] { cfg.lens.validate(); });
  check("sweep", [&] { cfg.sweep.validate(); });
  check("validate", [&] { cfg.checks.validate(); });
  return cfg;
}

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [sec, keys] : schema()) {
    if (!out.empty()) out += "\n";
    out += "[" + sec + "]\n";
    for (const auto& [name, key] : keys) out += name + " = " + key.get(cfg) + "\n";
  }
  return out;
}

}  // namespace horizon

#include "horizon/runner.hpp"

#include "horizon/checks.hpp"
#include "horizon/io.hpp"
#include "horizon/lattice.hpp"
#include "horizon/spectra.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace horizon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Every configuration value, as written by serialize.
json parameters(const ExperimentConfig& cfg) {
  json j = json::object();
  std::istringstream in(serialize(cfg));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      j[section] = json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    j[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

json base_metadata(const ExperimentConfig& cfg) {
  json j;
  j["command"] = to_string(cfg.command);
  j["version"] = version;
  j["threads"] = cfg.threads;
  j["parameters"] = parameters(cfg);
  j["config_text"] = serialize(cfg);
  return j;
}

std::string tag(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

int run_spectrum(const ExperimentConfig& cfg, std::ostream& log, json& meta) {
  const SpectrumConfig& sc = cfg.spectrum;
  const LatticeSpec spec = sc.lattice();
  const Tilt V{sc.vx, sc.vy};
  const double dn = std::hypot(sc.dir_x, sc.dir_y);
  std::vector<Momentum> path;
  for (int i = 0; i < sc.points; ++i) {
    const double s = -pi + 2.0 * pi * i / (sc.points - 1);
    path.push_back({s * sc.dir_x / dn + 0.0, s * sc.dir_y / dn + 0.0});
  }
  const auto samples = band_path(spec, V, path);
  {
    std::ofstream os(fs::path(cfg.out) / "band.csv", std::ios::binary);
    if (!os) throw Error("cannot open band.csv for writing");
    write_band_csv(os, samples);
  }
  const ConeParams cone = cone_params(spec, V);
  const StabilityReport st = stability_scan(spec, V, sc.scan_resolution);
  const double cross = crossing_frequency(spec, V);
  CsvWriter w(fs::path(cfg.out) / "summary.csv", {"quantity", "value"});
  w.row({"slope_x_1", num(cone.slope_x[0])});
  w.row({"slope_x_2", num(cone.slope_x[1])});
  w.row({"slope_y_1", num(cone.slope_y[0])});
  w.row({"slope_y_2", num(cone.slope_y[1])});
  w.row({"slope_along_1", num(cone.slope_along[0])});
  w.row({"slope_along_2", num(cone.slope_along[1])});
  w.row({"tilt_class", to_string(cone.tilt_class)});
  w.row({"omega_node", num(cone.omega_node)});
  w.row({"crossing_frequency", num(cross)});
  w.row({"max_imag_omega", num(st.max_imag)});
  w.row({"min_eig_m0", num(st.min_eig_m0)});
  w.row({"omega_max", num(st.omega_max)});
  w.close();
  meta["tilt_class"] = to_string(cone.tilt_class);
  meta["stable"] = st.max_imag < 1e-9 && st.min_eig_m0 >= -1e-12;
  log << "cone slopes along tilt: " << num(cone.slope_along[0]) << ", " << num(cone.slope_along[1]) << " ("
      << to_string(cone.tilt_class) << ")\n"
      << "stability: max |Im Omega| = " << num(st.max_imag) << ", min eig M0 = " << num(st.min_eig_m0) << "\n";
  return 0;
}

void write_side_series(const fs::path& dir, const TunnelingRecord& r, std::size_t idx) {
  const SideResult& c = r.classical;
  const SideResult& q = r.quantum;
  const std::size_t n = std::max(c.times.size(), q.times.size());
  CsvWriter w(dir / ("left_norm_p" + std::to_string(idx) + ".csv"), {"t", "classical", "quantum"});
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i < c.times.size() ? c.times[i] : q.times[i];
    w.row({num(t), i < c.left_norm.size() ? num(c.left_norm[i]) : "", i < q.left_norm.size() ? num(q.left_norm[i]) : ""});
  }
  w.close();
}

int run_hawking(const ExperimentConfig& cfg, std::ostream& log, json& meta) {
  const HawkingConfig& hc = cfg.hawking;
  const fs::path out(cfg.out);
  ensure_dir(out / "series");
  ensure_dir(out / "snapshots");
  log << "hawking sweep over " << hc.omegas.size() << " frequencies (" << to_string(hc.which) << ")\n";
  const SweepResult res = sweep(hc);

  CsvWriter s(out / "sweep.csv", {"omega", "chi_c", "chi_q", "gamma_H", "gamma_s"});
  CsvWriter d(out / "records.csv",
              {"omega", "model", "valid", "k0", "frequency", "group_velocity", "chi", "t_measure", "plateau",
               "edge_fraction", "k_transmitted", "k_expected", "conservation_drift"});
  CsvWriter idx(out / "snapshots" / "index.csv", {"file", "model", "omega", "t", "nx", "ny"});
  json points = json::array();
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const TunnelingRecord& r = res.records[i];
    auto chi_cell = [](const SideResult& x) { return x.ran && x.valid ? num(x.chi) : std::string(); };
    s.row({num(r.omega), chi_cell(r.classical), chi_cell(r.quantum), num(r.analytic.gamma_h),
           num(r.analytic.gamma_s)});
    json p;
    p["omega"] = r.omega;
    for (const auto& [name, side] : {std::pair<const char*, const SideResult*>{"classical", &r.classical},
                                     std::pair<const char*, const SideResult*>{"quantum", &r.quantum}}) {
      if (!side->ran) continue;
      d.row({num(r.omega), name, num(side->valid), num(side->carrier.k0), num(side->carrier.frequency),
             num(side->carrier.group_velocity), num(side->chi), num(side->t_measure), num(side->plateau),
             num(side->edge_fraction), num(side->k_transmitted), num(side->k_expected),
             num(side->conservation_drift)});
      for (std::size_t k = 0; k < side->snapshots.size(); ++k) {
        const std::string file = "p" + std::to_string(i) + "_" + name + "_" + tag("t%.0f", side->snapshot_times[k]) + ".bin";
        write_snapshot(out / "snapshots" / file, hc.cells(), 1, side->snapshot_times[k], side->snapshots[k]);
        idx.row({file, name, num(r.omega), num(side->snapshot_times[k]), num(hc.cells()), num(1)});
      }
      p[name] = {{"wall_seconds", side->wall_seconds}, {"valid", side->valid}, {"problem", side->problem},
                 {"plateau", side->plateau}};
      if (!side->valid) log << "  omega " << num(r.omega) << " " << name << ": " << side->problem << "\n";
    }
    write_side_series(out / "series", r, i);
    points.push_back(p);
    log << "  omega " << tag("%.4g", r.omega) << ": chi_c " << tag("%.4g", r.classical.chi) << ", chi_q "
        << tag("%.4g", r.quantum.chi) << ", Gamma_H " << tag("%.4g", r.analytic.gamma_h) << "\n";
  }
  s.close();
  d.close();
  idx.close();

  auto fit_json = [](const LineFit& f) {
    return json{{"slope", f.slope}, {"intercept", f.intercept}, {"slope_ci95", {f.slope_lo, f.slope_hi}},
                {"points", f.points}};
  };
  meta["fit_ln_chi_q"] = fit_json(res.fit_q);
  meta["fit_ln_chi_c"] = fit_json(res.fit_c);
  meta["expected_slope"] = -2.0 * pi / hc.gamma_t;
  meta["rank_correlation_chi_c"] = res.rank_corr_c;
  meta["rank_correlation_chi_q"] = res.rank_corr_q;
  meta["measurement"] = "left-region norm at the first plateau of its moving average, else at t_end";
  meta["points"] = points;
  log << "ln chi_q slope " << tag("%.4g", res.fit_q.slope) << " [" << tag("%.4g", res.fit_q.slope_lo) << ", "
      << tag("%.4g", res.fit_q.slope_hi) << "], expected " << tag("%.4g", -2.0 * pi / hc.gamma_t) << "\n";
  return 0;
}

void write_track(const fs::path& path, const CentroidTrack& tr) {
  CsvWriter w(path, {"t", "x", "y", "r", "captured", "edge"});
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    w.row({num(tr.t[i]), num(tr.x[i]), num(tr.y[i]), num(tr.r[i]), num(tr.captured[i]), num(tr.edge[i])});
  }
  w.close();
}

const std::vector<std::string> metric_header{"gamma", "b", "side", "valid", "closest_approach", "t_closest",
                                             "captured", "defined", "bending_deg", "captured_fraction",
                                             "max_deviation"};

std::vector<std::string> metric_row(double g, double b, int side, bool valid, const Deflection& d) {
  return {num(g), num(b), num(side), num(valid), num(d.closest_approach), num(d.t_closest), num(d.captured),
          num(d.defined), d.defined ? num(d.bending_deg) : std::string(), num(d.captured_fraction),
          num(d.max_deviation)};
}

void write_lens_snapshots(const fs::path& dir, const std::string& prefix, const LensingConfig& lc,
                          const LensingRun& run, CsvWriter& idx) {
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const std::string file = prefix + tag("t%.0f", run.snapshot_times[k]) + ".bin";
    write_snapshot(dir / file, lc.nx, lc.ny, run.snapshot_times[k], run.snapshots[k]);
    idx.row({file, num(lc.gamma), num(lc.b), num(lc.side), num(run.snapshot_times[k]), num(lc.nx), num(lc.ny)});
  }
}

int run_lens(const ExperimentConfig& cfg, std::ostream& log, json& meta) {
  const LensingConfig& lc = cfg.lens;
  const fs::path out(cfg.out);
  ensure_dir(out / "snapshots");
  const LensingRun run = run_lensing(lc);
  const Deflection d = deflection_metrics(run.track, lc);
  write_track(out / "track.csv", run.track);
  CsvWriter m(out / "metrics.csv", metric_header);
  m.row(metric_row(lc.gamma, lc.b, lc.side, run.valid, d));
  m.close();
  CsvWriter idx(out / "snapshots" / "index.csv", {"file", "gamma", "b", "side", "t", "nx", "ny"});
  write_lens_snapshots(out / "snapshots", "", lc, run, idx);
  idx.close();
  meta["dt"] = run.dt;
  meta["omega_max"] = run.omega_max;
  meta["carrier_frequency"] = run.omega0;
  meta["energy_drift"] = run.energy_drift;
  meta["wall_seconds_run"] = run.wall_seconds;
  meta["valid"] = run.valid;
  meta["problem"] = run.problem;
  meta["note"] = d.note;
  log << "closest approach " << tag("%.4g", d.closest_approach) << " at t=" << tag("%.4g", d.t_closest)
      << (d.defined ? ", bending " + tag("%.4g", d.bending_deg) + " deg" : ", " + d.note) << ", captured fraction "
      << tag("%.3g", d.captured_fraction) << "\n";
  if (!run.valid) log << "invalid run: " << run.problem << "\n";
  return 0;
}

int run_sweep(const ExperimentConfig& cfg, std::ostream& log, json& meta) {
  const fs::path out(cfg.out);
  ensure_dir(out / "tracks");
  ensure_dir(out / "snapshots");
  const LensSweepResult res = lens_sweep(cfg.lens, cfg.sweep);
  CsvWriter m(out / "sweep.csv", metric_header);
  CsvWriter idx(out / "snapshots" / "index.csv", {"file", "gamma", "b", "side", "t", "nx", "ny"});
  json runs = json::array();
  for (const LensSweepEntry& e : res.entries) {
    m.row(metric_row(e.gamma, e.b, e.side, e.run.valid, e.metrics));
    const std::string stem = "g" + tag("%g", e.gamma) + "_b" + tag("%g", e.b) + (e.side > 0 ? "_up" : "_down");
    write_track(out / "tracks" / (stem + ".csv"), e.run.track);
    LensingConfig lc = cfg.lens;
    lc.gamma = e.gamma;
    lc.b = e.b;
    lc.side = e.side;
    write_lens_snapshots(out / "snapshots", stem + "_", lc, e.run, idx);
    runs.push_back({{"gamma", e.gamma}, {"b", e.b}, {"side", e.side}, {"wall_seconds", e.run.wall_seconds},
                    {"dt", e.run.dt}, {"valid", e.run.valid}, {"problem", e.run.problem}, {"note", e.metrics.note}});
    log << "  gamma " << tag("%g", e.gamma) << " b " << tag("%g", e.b) << " side " << e.side << ": closest "
        << tag("%.4g", e.metrics.closest_approach)
        << (e.metrics.defined ? ", bending " + tag("%.4g", e.metrics.bending_deg) + " deg" : ", " + e.metrics.note)
        << "\n";
  }
  m.close();
  idx.close();
  meta["runs"] = runs;
  meta["monotone_in_gamma"] = res.monotone_gamma;
  meta["antimonotone_in_b"] = res.antimonotone_b;
  meta["straight_deviation"] = res.straight_deviation;
  meta["mirror"] = json::array();
  for (const auto& m : res.mirror) {
    meta["mirror"].push_back({{"gamma", m.gamma}, {"b", m.b}, {"captured", m.captured},
                              {"mismatch", m.mismatch}, {"mismatch_before_capture", m.before_capture}});
  }
  meta["ordering_rule"] = "captured runs rank above every finite bending angle";
  log << "monotone in gamma: " << (res.monotone_gamma ? "yes" : "no")
      << ", anti-monotone in b: " << (res.antimonotone_b ? "yes" : "no") << "\n";
  return 0;
}

int run_validate(const ExperimentConfig& cfg, std::ostream& log, json& meta) {
  const auto checks = run_checks(cfg.checks);
  CsvWriter w(fs::path(cfg.out) / "validate.csv", {"check", "value", "threshold", "pass"});
  bool all = true;
  for (const Check& c : checks) {
    w.row({c.name, num(c.value), c.threshold, num(c.pass)});
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-36s %-12.4g %-28s %s\n", c.name.c_str(), c.value, c.threshold.c_str(),
                  c.pass ? "PASS" : "FAIL");
    log << buf;
    all = all && c.pass;
  }
  w.close();
  meta["all_pass"] = all;
  return all ? 0 : 1;
}

}  // namespace

int run(const ExperimentConfig& cfg, std::ostream& log) {
  ensure_dir(cfg.out);
  omp_set_num_threads(cfg.threads);
  const auto start = std::chrono::steady_clock::now();
  json meta = base_metadata(cfg);
  int status = 0;
  switch (cfg.command) {
    case Command::spectrum: status = run_spectrum(cfg, log, meta); break;
    case Command::hawking: status = run_hawking(cfg, log, meta); break;
    case Command::lens: status = run_lens(cfg, log, meta); break;
    case Command::sweep: status = run_sweep(cfg, log, meta); break;
    case Command::validate: status = run_validate(cfg, log, meta); break;
  }
  meta["status"] = status == 0 ? "ok" : "check_failed";
  meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(fs::path(cfg.out) / "metadata.json", meta);
  return status;
}

void write_error_record(const ExperimentConfig* cfg, const std::string& type, const std::string& message) {
  json j{{"status", "error"}, {"type", type}, {"message", message}, {"version", version}};
  if (cfg) {
    j["command"] = to_string(cfg->command);
    try {
      ensure_dir(cfg->out);
      write_json(fs::path(cfg->out) / "error.json", j);
    } catch (const Error&) {
      // the record still goes to stderr
    }
  }
}

}  // namespace horizon

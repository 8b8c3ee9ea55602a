#include "horizon/lensing.hpp"

#include "horizon/lattice.hpp"
#include "horizon/potentials.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace horizon {

namespace {

constexpr int edge_band = 3;
// A packet counts as touching the boundary once this much energy sits in the
// edge band; a fast sub-percent fringe reaches the walls in every run.
constexpr double edge_limit = 1e-2;

struct LinearFit {
  Point mean;  // centroid position at the mean time
  Point v;
  double t_mean = 0.0;
};

LinearFit fit_window(const CentroidTrack& tr, double t_lo, double t_hi) {
  double st = 0, sx = 0, sy = 0;
  int n = 0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < t_lo - 1e-9 || tr.t[i] > t_hi + 1e-9) continue;
    st += tr.t[i];
    sx += tr.x[i];
    sy += tr.y[i];
    ++n;
  }
  if (n < 3) throw DomainError("deflection_metrics: fewer than three samples in a fit window");
  LinearFit f;
  f.t_mean = st / n;
  f.mean = {sx / n, sy / n};
  double stt = 0, stx = 0, sty = 0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < t_lo - 1e-9 || tr.t[i] > t_hi + 1e-9) continue;
    const double dt = tr.t[i] - f.t_mean;
    stt += dt * dt;
    stx += dt * (tr.x[i] - f.mean.x);
    sty += dt * (tr.y[i] - f.mean.y);
  }
  f.v = {stx / stt, sty / stt};
  return f;
}

}  // namespace

LatticeSpec LensingConfig::lattice() const {
  LatticeSpec s = LatticeSpec::grid(nx, ny);
  s.t_x = t_x;
  s.t_y = t_y;
  s.t_z = t_z;
  return s;
}

void LensingConfig::validate() const {
  auto fail = [](const char* key, const char* why) {
    throw FieldError(key, std::string("lens: ") + key + " " + why);
  };
  if (nx < 8) fail("nx", "must be at least 8");
  if (ny < 8) fail("ny", "must be at least 8");
  if (!(gamma >= 0)) fail("gamma", "must be non-negative");
  if (!(b > 0)) fail("b", "must be positive");
  if (side != 1 && side != -1) fail("side", "must be 1 or -1");
  if (!(cx >= 0 && cx <= nx - 1)) fail("cx", "must lie on the grid");
  if (!(x0 >= 0 && x0 <= nx - 1)) fail("x0", "must lie on the grid");
  if (!(y0() >= 0 && y0() <= ny - 1 && cy() >= 0 && cy() <= ny - 1)) fail("b", "puts the hole or the launch off the grid");
  if (!(std::hypot(cx - x0, b) > gamma)) fail("b", "puts the launch point inside the horizon");
  if (!(sigma >= 4)) fail("sigma", "must be at least 4 cells");
  if (!(k0 > 0 && k0 < pi)) fail("k0", "must lie in (0, pi)");
  if (!(t_x > 0)) fail("t_x", "must be positive");
  if (!(t_y > 0)) fail("t_y", "must be positive");
  if (!(t_z > 0)) fail("t_z", "must be positive");
  if (!(r_cap > 0)) fail("r_cap", "must be positive");
  if (!(t_end > 0)) fail("t_end", "must be positive");
  if (!(sample > 0)) fail("sample", "must be positive");
  if (!(pre_window >= 2 * sample && post_window >= 2 * sample)) fail("pre_window", "windows need three samples");
  if (!(pre_window + post_window <= t_end)) fail("post_window", "windows overlap");
  for (double t : snapshot_times) {
    if (!(t >= 0 && t <= t_end)) fail("snapshot_times", "entries must lie in [0, t_end]");
  }
  if (snapshot_stride < 0) fail("stride", "must be non-negative");
}

Point centroid(const std::vector<double>& cell_density, int nx, int ny, const std::vector<unsigned char>& mask) {
  if (static_cast<long>(cell_density.size()) != static_cast<long>(nx) * ny) {
    throw DomainError("centroid: density size does not match the grid");
  }
  if (!mask.empty() && mask.size() != cell_density.size()) throw DomainError("centroid: mask size mismatch");
  double s = 0, sx = 0, sy = 0;
  for (int n = 0; n < ny; ++n) {
    for (int m = 0; m < nx; ++m) {
      const std::size_t c = static_cast<std::size_t>(m + nx * n);
      if (!mask.empty() && !mask[c]) continue;
      s += cell_density[c];
      sx += m * cell_density[c];
      sy += n * cell_density[c];
    }
  }
  if (!(s > 0)) throw DomainError("centroid: no density on the mask");
  return {sx / s, sy / s};
}

LensingRun run_lensing(const LensingConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const LatticeSpec spec = cfg.lattice();
  const double cy = cfg.cy();
  const PotentialField field = cfg.gamma > 0 ? funnel(spec, cfg.gamma, cfg.cx, cy, cfg.r_cap) : zero_field(spec);
  const LatticeModel model = build_lattice(spec, field);

  LensingRun run;
  run.omega_max = estimate_omega_max(model);
  const long per_sample = std::max(1L, static_cast<long>(std::ceil(cfg.sample * run.omega_max / 0.2 - 1e-12)));
  run.dt = cfg.dt > 0 ? cfg.dt : cfg.sample / static_cast<double>(per_sample);
  const double ratio = cfg.sample / run.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw DomainError("lens: sample must be a whole number of time steps");
  }

  WavepacketSpec wp;
  wp.x0 = cfg.x0;
  wp.y0 = cfg.y0();
  wp.sigma = cfg.sigma;
  wp.k0 = {cfg.k0, 0.0};
  wp.branch = 1;  // the +x moving branch at k > 0
  const ClassicalPacket packet = init_wavepacket_classical(model, wp);
  run.omega0 = packet.omega0;

  const int cells = spec.cells();
  std::vector<unsigned char> outside(cells), inside_rs(cells), edge(cells);
  for (int n = 0; n < spec.ny; ++n) {
    for (int m = 0; m < spec.nx; ++m) {
      const int c = m + spec.nx * n;
      const double r = std::hypot(m - cfg.cx, n - cy);
      outside[c] = r >= cfg.r_cap;
      inside_rs[c] = cfg.gamma > 0 && r < cfg.r_s();
      edge[c] = m < edge_band || n < edge_band || m >= spec.nx - edge_band || n >= spec.ny - edge_band;
    }
  }

  auto sample = [&](const FieldState& s) {
    const auto d = cell_density(amplitude_sq(s, run.omega0));
    double total = 0, cap = 0, ed = 0;
    for (int c = 0; c < cells; ++c) {
      total += d[c];
      if (inside_rs[c]) cap += d[c];
      if (edge[c]) ed += d[c];
    }
    const Point p = centroid(d, spec.nx, spec.ny, outside);
    CentroidTrack& tr = run.track;
    tr.t.push_back(s.t);
    tr.x.push_back(p.x);
    tr.y.push_back(p.y);
    tr.r.push_back(std::hypot(p.x - cfg.cx, p.y - cy));
    tr.captured.push_back(cap / total);
    tr.edge.push_back(ed / total);
    bool snap = cfg.snapshot_stride > 0 && (tr.t.size() - 1) % cfg.snapshot_stride == 0;
    for (double ts : cfg.snapshot_times) snap = snap || std::abs(s.t - ts) < 0.5 * cfg.sample;
    if (snap) {
      run.snapshot_times.push_back(s.t);
      run.snapshots.push_back(d);
    }
  };

  EvolveOptions opt;
  opt.dt = run.dt;
  opt.t_end = cfg.t_end;
  opt.omega_max = run.omega_max;
  opt.observe_every = static_cast<int>(std::lround(ratio));
  opt.observer = [&](long, const FieldState& s) { sample(s); };
  const Trajectory tr = evolve(model, packet.state, opt);
  run.energy_drift = std::abs(tr.final_energy - tr.initial_energy) / std::abs(tr.initial_energy);

  // boundary contact before closest approach invalidates the run
  const auto& r = run.track.r;
  const std::size_t ica = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
  for (std::size_t i = 0; i <= ica; ++i) {
    if (run.track.edge[i] > edge_limit) {
      run.valid = false;
      char buf[128];
      std::snprintf(buf, sizeof buf, "packet reached the grid edge at t=%.6g before closest approach",
                    run.track.t[i]);
      run.problem = buf;
      break;
    }
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

Deflection deflection_metrics(const CentroidTrack& track, const LensingConfig& cfg) {
  if (track.t.size() < 3) throw DomainError("deflection_metrics: track too short");
  Deflection d;
  const auto it = std::min_element(track.r.begin(), track.r.end());
  const std::size_t ica = static_cast<std::size_t>(it - track.r.begin());
  d.closest_approach = *it;
  d.t_closest = track.t[ica];
  d.captured_fraction = track.captured.back();
  d.captured = cfg.gamma > 0 && d.closest_approach < cfg.r_s();

  const double t0 = track.t.front(), t1 = track.t.back();
  const LinearFit in = fit_window(track, t0, t0 + cfg.pre_window);
  d.v_in = in.v;
  const double speed = std::hypot(in.v.x, in.v.y);
  for (std::size_t i = 0; i < track.t.size(); ++i) {
    const double px = in.mean.x + in.v.x * (track.t[i] - in.t_mean);
    const double py = in.mean.y + in.v.y * (track.t[i] - in.t_mean);
    // perpendicular part of the offset from the incoming line
    const double ox = track.x[i] - px, oy = track.y[i] - py;
    const double perp = speed > 0 ? std::abs(ox * in.v.y - oy * in.v.x) / speed : std::hypot(ox, oy);
    d.max_deviation = std::max(d.max_deviation, perp);
  }

  if (d.captured) {
    d.note = "centroid entered the horizon; bending angle undefined";
    return d;
  }
  if (d.t_closest > t1 - cfg.post_window) {
    d.note = "track ends before the closest approach; bending angle undefined";
    return d;
  }
  const LinearFit out = fit_window(track, t1 - cfg.post_window, t1);
  d.v_out = out.v;
  const double cross = in.v.x * out.v.y - in.v.y * out.v.x;
  const double dot = in.v.x * out.v.x + in.v.y * out.v.y;
  const double angle = std::atan2(cross, dot) * 180.0 / pi;
  // inward means turning toward the side of the incoming line that holds the hole
  const double hx = cfg.cx - track.x.front(), hy = cfg.cy() - track.y.front();
  const double side = in.v.x * hy - in.v.y * hx >= 0 ? 1.0 : -1.0;
  d.bending_deg = side * angle;
  d.defined = true;
  return d;
}

void LensSweepConfig::validate() const {
  auto fail = [](const char* key, const char* why) {
    throw FieldError(key, std::string("sweep: ") + key + " " + why);
  };
  if (gammas.size() < 2) fail("gammas", "needs at least two values");
  if (bs.size() < 2) fail("bs", "needs at least two values");
  for (double g : gammas) {
    if (!(g > 0)) fail("gammas", "entries must be positive");
  }
  for (double b : bs) {
    if (!(b > 0)) fail("bs", "entries must be positive");
  }
  if (!(gamma_for_b > 0)) fail("gamma_for_b", "must be positive");
  if (!(b_for_gamma > 0)) fail("b_for_gamma", "must be positive");
}

double bending_rank(const Deflection& d) {
  if (d.captured) return std::numeric_limits<double>::infinity();
  if (!d.defined) return std::numeric_limits<double>::quiet_NaN();
  return d.bending_deg;
}

double mirror_mismatch(const CentroidTrack& a, const CentroidTrack& b, int ny, double t_max) {
  if (a.t.size() != b.t.size()) throw DomainError("mirror_mismatch: tracks have different lengths");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.t.size() && a.t[i] < t_max; ++i) {
    worst = std::max(worst, std::hypot(a.x[i] - b.x[i], a.y[i] - (ny - 1 - b.y[i])));
  }
  return worst;
}

LensSweepResult lens_sweep(const LensingConfig& base, const LensSweepConfig& sweep) {
  base.validate();
  sweep.validate();
  LensSweepResult res;
  auto find = [&](double g, double b, int side) -> const LensSweepEntry* {
    for (const auto& e : res.entries) {
      if (e.gamma == g && e.b == b && e.side == side) return &e;
    }
    return nullptr;
  };
  auto run = [&](double g, double b, int side) -> const LensSweepEntry& {
    if (const LensSweepEntry* e = find(g, b, side)) return *e;
    LensingConfig c = base;
    c.gamma = g;
    c.b = b;
    c.side = side;
    LensSweepEntry e{g, b, side, run_lensing(c), {}};
    e.metrics = deflection_metrics(e.run.track, c);
    res.entries.push_back(std::move(e));
    return res.entries.back();
  };

  std::vector<double> gs = sweep.gammas, bs = sweep.bs;
  std::sort(gs.begin(), gs.end());
  std::sort(bs.begin(), bs.end());
  std::vector<double> by_gamma, by_b;
  for (double g : gs) by_gamma.push_back(bending_rank(run(g, sweep.b_for_gamma, 1).metrics));
  for (double b : bs) by_b.push_back(bending_rank(run(sweep.gamma_for_b, b, 1).metrics));
  // NaN compares false, so an undefined angle breaks both orderings
  res.monotone_gamma = true;
  for (std::size_t i = 1; i < by_gamma.size(); ++i) {
    res.monotone_gamma = res.monotone_gamma && (by_gamma[i] > by_gamma[i - 1] ||
                                                (std::isinf(by_gamma[i]) && std::isinf(by_gamma[i - 1])));
  }
  res.antimonotone_b = true;
  for (std::size_t i = 1; i < by_b.size(); ++i) {
    res.antimonotone_b =
        res.antimonotone_b && (by_b[i] < by_b[i - 1] || (std::isinf(by_b[i]) && std::isinf(by_b[i - 1])));
  }
  if (sweep.straight) res.straight_deviation = run(0.0, sweep.b_for_gamma, 1).metrics.max_deviation;
  if (sweep.mirror) {
    for (double b : bs) {
      // copies: run() may grow the entry list
      const CentroidTrack up = run(sweep.gamma_for_b, b, 1).run.track;
      const CentroidTrack down = run(sweep.gamma_for_b, b, -1).run.track;
      double t_in = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < up.t.size(); ++i) {
        if (up.r[i] < sweep.gamma_for_b || down.r[i] < sweep.gamma_for_b) {
          t_in = up.t[i];
          break;
        }
      }
      res.mirror.push_back({sweep.gamma_for_b, b, std::isfinite(t_in), mirror_mismatch(up, down, base.ny),
                            mirror_mismatch(up, down, base.ny, t_in)});
    }
  }
  return res;
}

}  // namespace horizon

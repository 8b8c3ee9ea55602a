#include "horizon/hawking.hpp"

#include "horizon/lattice.hpp"
#include "horizon/quantum.hpp"
#include "horizon/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

namespace horizon {

namespace {

constexpr int edge_cells = 50;
constexpr int spectrum_points = 4096;

// Root of f on [lo, hi]; f must change sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, const char* what) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw DomainError(std::string(what) + ": target frequency outside the branch range");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double classical_branch(const LatticeSpec& spec, Tilt V, double k, int idx) {
  return quadratic_eigensolve(bloch_matrices(spec, V, {k, 0.0}))[idx].omega.real();
}

double quantum_band(const LatticeSpec& spec, Tilt V, double k, int band) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(bloch_hamiltonian(spec, V, {k, 0.0}), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(band);
}

double slope(const std::function<double(double)>& f, double k) {
  const double h = 1e-6;
  return (f(k + h) - f(k - h)) / (2.0 * h);
}

Tilt launch_tilt(const PotentialField& field, double x0) {
  const int m = std::clamp(static_cast<int>(std::lround(x0)), 0, field.nx - 1);
  return field.at(m, 0);
}

PotentialField classical_field(const HawkingConfig& cfg) {
  return tanh_interface(cfg.lattice(), cfg.gamma_t, cfg.x_h(), 1.0);
}

int steps_per(double interval, double dt, const char* what) {
  const double r = interval / dt;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
    throw DomainError(std::string("hawking: ") + what + " must be a whole number of time steps");
  }
  return static_cast<int>(n);
}

// Online form of the plateau rule, shared by find_plateau and the runs.
class PlateauTracker {
 public:
  PlateauTracker(double launch_norm, const PlateauRule& rule)
      : launch_(launch_norm), rule_(rule),
        window_(std::max(1L, std::lround(rule.window / rule.sample))),
        span_(std::max(1L, std::lround(rule.span / rule.sample))) {}

  // Returns true on the first sample that satisfies the rule.
  bool push(double t, double value) {
    values_.push_back(value);
    prefix_.push_back((prefix_.empty() ? 0.0 : prefix_.back()) + value);
    const long i = static_cast<long>(values_.size()) - 1;
    if (result_.found || i - span_ < window_ - 1) return false;
    const double s = smoothed(i);
    const double s0 = smoothed(i - span_);
    if (s >= rule_.floor * launch_ && std::abs(s - s0) <= rule_.rel_change * s) {
      result_ = {s, t, true};
      return true;
    }
    return false;
  }

  const Plateau& result() const { return result_; }

 private:
  double smoothed(long i) const {
    const double hi = prefix_[i];
    const double lo = i - window_ >= 0 ? prefix_[i - window_] : 0.0;
    return (hi - lo) / static_cast<double>(window_);
  }

  double launch_;
  PlateauRule rule_;
  long window_;
  long span_;
  std::vector<double> values_;
  std::vector<double> prefix_;
  Plateau result_;
};

double region_sum(const std::vector<double>& site_density, int first_cell, int last_cell) {
  double s = 0.0;
  for (int c = first_cell; c < last_cell; ++c) s += site_density[2 * c] + site_density[2 * c + 1];
  return s;
}

double edge_sum(const std::vector<double>& site_density, int cells) {
  return region_sum(site_density, 0, edge_cells) + region_sum(site_density, cells - edge_cells, cells);
}

double peak_momentum(const std::vector<cplx>& field) {
  const Spectrum1d s = spatial_spectrum(field, spectrum_points);
  const auto it = std::max_element(s.magnitude.begin(), s.magnitude.end());
  return s.k[static_cast<std::size_t>(it - s.magnitude.begin())];
}

// Bookkeeping common to both sides: left-norm samples, plateau, snapshots.
class Recorder {
 public:
  Recorder(const HawkingConfig& cfg, SideResult& out, double launch_norm)
      : cfg_(cfg), out_(out), tracker_(launch_norm, cfg.plateau) {
    out_.launch_norm = launch_norm;
  }

  // Returns true when this sample is the plateau, so the caller can take
  // measurements from the current state.
  bool sample(double t, const std::vector<double>& site_density) {
    const double left = region_sum(site_density, 0, cfg_.n_left);
    out_.times.push_back(t);
    out_.left_norm.push_back(left / out_.launch_norm);
    bool snap = cfg_.snapshot_stride > 0 && count_ % cfg_.snapshot_stride == 0;
    for (double ts : cfg_.snapshot_times) snap = snap || std::abs(t - ts) < 0.5 * cfg_.plateau.sample;
    if (snap) {
      out_.snapshot_times.push_back(t);
      out_.snapshots.push_back(cell_density(site_density));
    }
    ++count_;
    if (tracker_.push(t, left)) {
      measure(t, tracker_.result().value, site_density);
      out_.plateau = true;
      return true;
    }
    return false;
  }

  bool found() const { return tracker_.result().found; }

  void measure(double t, double left_value, const std::vector<double>& site_density) {
    out_.t_measure = t;
    out_.chi = left_value / out_.launch_norm;
    out_.edge_fraction = edge_sum(site_density, cfg_.cells()) / out_.launch_norm;
  }

 private:
  const HawkingConfig& cfg_;
  SideResult& out_;
  PlateauTracker tracker_;
  long count_ = 0;
};

void finish_validity(SideResult& r) {
  if (r.edge_fraction > 1e-3) {
    r.valid = false;
    char buf[128];
    std::snprintf(buf, sizeof buf, "packet reached a chain end before measurement (edge fraction %.3e)",
                  r.edge_fraction);
    r.problem = buf;
  }
}

SideResult run_classical(const HawkingConfig& cfg, const PotentialField& field, double omega) {
  const auto start = std::chrono::steady_clock::now();
  SideResult r;
  r.ran = true;
  const LatticeSpec spec = cfg.lattice();
  const LatticeModel model = build_lattice(spec, field);
  r.carrier = classical_carrier(cfg, omega);
  WavepacketSpec wp;
  wp.x0 = cfg.x0;
  wp.sigma = cfg.sigma;
  wp.k0 = {r.carrier.k0, 0.0};
  wp.branch = r.carrier.branch;
  const ClassicalPacket packet = init_wavepacket_classical(model, wp);
  const double w0 = packet.omega0;
  r.k_expected = classical_flat_momentum(cfg, w0);

  const auto d0 = amplitude_sq(packet.state, w0);
  Recorder rec(cfg, r, region_sum(d0, cfg.cells() - cfg.n_right, cfg.cells()));
  if (!(r.launch_norm > 0)) throw DomainError("hawking: zero launch norm");
  auto transmitted_k = [&](const FieldState& s) {
    std::vector<cplx> psi(static_cast<std::size_t>(cfg.n_left));
    for (int c = 0; c < cfg.n_left; ++c) psi[c] = cplx(s.u[2 * c], s.v[2 * c] / w0);
    return peak_momentum(psi);
  };

  EvolveOptions opt;
  opt.dt = cfg.dt_classical;
  opt.t_end = cfg.t_end;
  opt.observe_every = steps_per(cfg.plateau.sample, cfg.dt_classical, "plateau sample interval");
  opt.observer = [&](long, const FieldState& s) {
    if (rec.sample(s.t, amplitude_sq(s, w0))) r.k_transmitted = transmitted_k(s);
  };
  const Trajectory tr = evolve(model, packet.state, opt);
  if (!rec.found()) {
    const auto d = amplitude_sq(tr.final_state, w0);
    rec.measure(tr.final_state.t, region_sum(d, 0, cfg.n_left), d);
    r.k_transmitted = transmitted_k(tr.final_state);
  }
  r.conservation_drift = std::abs(tr.final_energy - tr.initial_energy) / std::abs(tr.initial_energy);
  finish_validity(r);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SideResult run_quantum(const HawkingConfig& cfg, const PotentialField& field, double omega) {
  const auto start = std::chrono::steady_clock::now();
  SideResult r;
  r.ran = true;
  const LatticeSpec spec = cfg.lattice();
  const QuantumOperator h = build_hamiltonian(spec, field);
  r.carrier = quantum_carrier(cfg, omega);
  WavepacketSpec wp;
  wp.x0 = cfg.x0;
  wp.sigma = cfg.sigma;
  wp.k0 = {r.carrier.k0, 0.0};
  wp.branch = r.carrier.branch;
  const QuantumPacket packet = init_wavepacket_quantum(spec, field, wp);
  r.k_expected = quantum_flat_momentum(cfg, packet.energy);

  const auto p0 = probability(packet.state);
  Recorder rec(cfg, r, region_sum(p0, cfg.cells() - cfg.n_right, cfg.cells()));
  if (!(r.launch_norm > 0)) throw DomainError("hawking: zero launch norm");
  auto transmitted_k = [&](const QuantumState& s) {
    std::vector<cplx> psi(static_cast<std::size_t>(cfg.n_left));
    for (int c = 0; c < cfg.n_left; ++c) psi[c] = s.psi[2 * c];
    return peak_momentum(psi);
  };

  SchrodingerOptions opt;
  opt.dt = cfg.dt_quantum;
  opt.t_end = cfg.t_end;
  opt.observe_every = steps_per(cfg.plateau.sample, cfg.dt_quantum, "plateau sample interval");
  opt.observer = [&](long, const QuantumState& s) {
    if (rec.sample(s.t, probability(s))) r.k_transmitted = transmitted_k(s);
  };
  const QuantumRun run = schrodinger_evolve(h, packet.state, opt);
  if (!rec.found()) {
    const auto d = probability(run.final_state);
    rec.measure(run.final_state.t, region_sum(d, 0, cfg.n_left), d);
    r.k_transmitted = transmitted_k(run.final_state);
  }
  r.conservation_drift = std::abs(run.final_norm - run.initial_norm) / run.initial_norm;
  finish_validity(r);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::string to_string(Which w) {
  switch (w) {
    case Which::classical: return "classical";
    case Which::quantum: return "quantum";
    case Which::both: return "both";
  }
  return "?";
}

LatticeSpec HawkingConfig::lattice() const {
  LatticeSpec s = LatticeSpec::chain(cells());
  s.t_x = t_x;
  s.t_z = t_z;
  s.a = a;
  return s;
}

void HawkingConfig::validate() const {
  auto fail = [](const char* key, const char* why) {
    throw FieldError(key, std::string("hawking: ") + key + " " + why);
  };
  if (n_left < 1) fail("n_left", "must be positive");
  if (n_mid < 0) fail("n_mid", "must be non-negative");
  if (n_right < 1) fail("n_right", "must be positive");
  if (!(gamma_t > 0)) fail("gamma_t", "must be positive");
  if (!(x0 >= n_left + n_mid && x0 < cells())) fail("x0", "must lie inside the over-tilted region");
  if (!(sigma >= 4)) fail("sigma", "must be at least 4 cells");
  if (!(dt_classical > 0)) fail("dt_classical", "must be positive");
  if (!(dt_quantum > 0)) fail("dt_quantum", "must be positive");
  if (!(t_end > 0)) fail("t_end", "must be positive");
  if (!(t_x > 0)) fail("t_x", "must be positive");
  if (!(t_z > 0)) fail("t_z", "must be positive");
  if (!(a > 0)) fail("a", "must be positive");
  for (double w : omegas) {
    if (!(w > 0)) fail("omegas", "entries must be positive");
  }
  for (double t : snapshot_times) {
    if (!(t >= 0 && t <= t_end)) fail("snapshot_times", "entries must lie in [0, t_end]");
  }
  if (!(plateau.sample > 0)) fail("plateau_sample", "must be positive");
  if (!(plateau.window >= plateau.sample)) fail("plateau_window", "must be at least one sample");
  if (!(plateau.span >= plateau.sample)) fail("plateau_span", "must be at least one sample");
  if (!(plateau.rel_change > 0)) fail("plateau_rel_change", "must be positive");
  if (!(plateau.floor >= 0)) fail("plateau_floor", "must be non-negative");
  if (n_left <= edge_cells) fail("n_left", "must exceed the 50-cell edge band");
  if (n_right <= edge_cells) fail("n_right", "must exceed the 50-cell edge band");
  if (snapshot_stride < 0) fail("stride", "must be non-negative");
}

Rates rates(double omega, double gamma_t) {
  if (!(gamma_t > 0)) throw DomainError("rates: gamma_t must be positive");
  const double x = 2.0 * pi * omega / gamma_t;
  return {std::exp(-x), 1.0 / (1.0 + std::exp(x))};
}

PacketFrequency omega_of_packet_classical(const LatticeSpec& spec, Tilt V, Momentum k0, int branch) {
  if (branch != 0 && branch != 1) throw DomainError("omega_of_packet: branch must be 0 or 1");
  const auto eig = quadratic_eigensolve(bloch_matrices(spec, V, k0));
  const double w = 2.0 * std::abs(eig[2 + branch].omega.real() - crossing_frequency(spec, V));
  return {w, w < 1e-9};
}

PacketFrequency omega_of_packet_quantum(const LatticeSpec& spec, Tilt V, Momentum k0, int branch) {
  if (branch != 0 && branch != 1) throw DomainError("omega_of_packet: branch must be 0 or 1");
  Eigen::SelfAdjointEigenSolver<Mat2> es(bloch_hamiltonian(spec, V, k0), Eigen::EigenvaluesOnly);
  const double w = std::abs(es.eigenvalues()(branch));
  return {w, w < 1e-9};
}

Carrier classical_carrier(const HawkingConfig& cfg, double omega) {
  const LatticeSpec spec = cfg.lattice();
  const Tilt V = launch_tilt(classical_field(cfg), cfg.x0);
  const double target = crossing_frequency(spec, V) + 0.5 * omega;
  auto f = [&](double k) { return classical_branch(spec, V, k, 2); };
  Carrier c;
  c.branch = 0;
  c.k0 = bisect([&](double k) { return f(k) - target; }, 0.5 * pi, pi, "classical_carrier");
  c.frequency = f(c.k0);
  c.group_velocity = slope(f, c.k0);
  if (!(c.group_velocity < 0)) throw DomainError("classical_carrier: carrier does not move toward the horizon");
  return c;
}

Carrier quantum_carrier(const HawkingConfig& cfg, double omega) {
  const LatticeSpec spec = cfg.lattice();
  const Tilt V = launch_tilt(classical_field(cfg).negated(), cfg.x0);
  auto f = [&](double k) { return quantum_band(spec, V, k, 0); };
  Carrier c;
  c.branch = 0;
  c.k0 = bisect([&](double k) { return f(k) - omega; }, 0.5 * pi, pi, "quantum_carrier");
  c.frequency = f(c.k0);
  c.group_velocity = slope(f, c.k0);
  if (!(c.group_velocity < 0)) throw DomainError("quantum_carrier: carrier does not move toward the horizon");
  return c;
}

double classical_flat_momentum(const HawkingConfig& cfg, double frequency) {
  const LatticeSpec spec = cfg.lattice();
  const Tilt V = classical_field(cfg).at(0, 0);
  return bisect([&](double k) { return classical_branch(spec, V, k, 3) - frequency; }, -0.5 * pi, -1e-9,
                "classical_flat_momentum");
}

double quantum_flat_momentum(const HawkingConfig& cfg, double energy) {
  const LatticeSpec spec = cfg.lattice();
  const Tilt V = classical_field(cfg).negated().at(0, 0);
  return bisect([&](double k) { return quantum_band(spec, V, k, 1) - energy; }, -pi, -1e-9,
                "quantum_flat_momentum");
}

double chi(const std::vector<double>& final_density, const std::vector<double>& initial_density, int n_left,
           int n_right) {
  if (final_density.size() != initial_density.size() || final_density.size() % 2 != 0) {
    throw DomainError("chi: densities must be per-site fields on the same chain");
  }
  const int cells = static_cast<int>(final_density.size() / 2);
  if (n_left < 0 || n_right < 0 || n_left > cells || n_right > cells) {
    throw DomainError("chi: region sizes exceed the chain");
  }
  const double init = region_sum(initial_density, cells - n_right, cells);
  if (!(init > 0)) throw DomainError("chi: zero initial norm in the launch region");
  return region_sum(final_density, 0, n_left) / init;
}

Plateau find_plateau(const std::vector<double>& times, const std::vector<double>& left_norm, double launch_norm,
                     const PlateauRule& rule) {
  if (times.size() != left_norm.size()) throw DomainError("find_plateau: series lengths differ");
  PlateauTracker tr(launch_norm, rule);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (tr.push(times[i], left_norm[i])) break;
  }
  return tr.result();
}

TunnelingRecord run_tunneling(const HawkingConfig& cfg, double omega) {
  cfg.validate();
  if (!(omega > 0)) throw DomainError("run_tunneling: omega must be positive");
  TunnelingRecord rec;
  rec.omega = omega;
  rec.analytic = rates(omega, cfg.gamma_t);
  // both sides read the same samples
  const PotentialField field = classical_field(cfg);
  if (cfg.which != Which::quantum) rec.classical = run_classical(cfg, field, omega);
  if (cfg.which != Which::classical) rec.quantum = run_quantum(cfg, field.negated(), omega);
  return rec;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw DomainError("fit_line: need at least three paired points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw DomainError("fit_line: abscissae are all equal");
  LineFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    sse += e * e;
  }
  const double se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.slope_lo = f.slope - tq * se;
  f.slope_hi = f.slope + tq * se;
  return f;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw DomainError("spearman: need at least two paired points");
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t q = i; q <= j; ++q) r[idx[q]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double m = 0.5 * static_cast<double>(n - 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - m) * (ry[i] - m);
    sxx += (rx[i] - m) * (rx[i] - m);
    syy += (ry[i] - m) * (ry[i] - m);
  }
  if (!(sxx > 0 && syy > 0)) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

SweepResult sweep(const HawkingConfig& cfg) {
  cfg.validate();
  std::vector<double> ws = cfg.omegas;
  std::sort(ws.begin(), ws.end());
  SweepResult out;
  for (double w : ws) out.records.push_back(run_tunneling(cfg, w));

  auto collect = [&](bool quantum, std::vector<double>& x, std::vector<double>& lny, std::vector<double>& y) {
    for (const auto& r : out.records) {
      const SideResult& s = quantum ? r.quantum : r.classical;
      if (!s.ran || !s.valid || !(s.chi > 0)) continue;
      x.push_back(r.omega);
      lny.push_back(std::log(s.chi));
      y.push_back(s.chi);
    }
  };
  for (int q = 0; q < 2; ++q) {
    std::vector<double> x, lny, y;
    collect(q == 1, x, lny, y);
    if (x.size() >= 3) (q == 1 ? out.fit_q : out.fit_c) = fit_line(x, lny);
    if (x.size() >= 2) (q == 1 ? out.rank_corr_q : out.rank_corr_c) = spearman(x, y);
  }
  return out;
}

}  // namespace horizon

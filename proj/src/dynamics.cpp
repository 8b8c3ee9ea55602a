#include "horizon/dynamics.hpp"

#include "horizon/spectra.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace horizon {

namespace {

int nearest_cell(double x, int n) {
  return std::clamp(static_cast<int>(std::lround(x)), 0, n - 1);
}

void check_finite(const std::vector<double>& x, double t) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "non-finite state at t=%.6g", t);
      throw NumericalError(buf);
    }
  }
}

// Preallocated RK4 workspace.
class Stepper {
 public:
  explicit Stepper(const LatticeModel& model)
      : model_(model), n_(static_cast<std::size_t>(model.sites())),
        a1_(n_), a2_(n_), a3_(n_), a4_(n_), u_(n_), v2_(n_), v3_(n_), v4_(n_) {}

  void step(std::vector<double>& u, std::vector<double>& v, double dt) {
    const long n = static_cast<long>(n_);
    const double h = 0.5 * dt;
    model_.acceleration(u.data(), v.data(), a1_.data());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      u_[i] = u[i] + h * v[i];
      v2_[i] = v[i] + h * a1_[i];
    }
    model_.acceleration(u_.data(), v2_.data(), a2_.data());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      u_[i] = u[i] + h * v2_[i];
      v3_[i] = v[i] + h * a2_[i];
    }
    model_.acceleration(u_.data(), v3_.data(), a3_.data());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      u_[i] = u[i] + dt * v3_[i];
      v4_[i] = v[i] + dt * a3_[i];
    }
    model_.acceleration(u_.data(), v4_.data(), a4_.data());
    const double s = dt / 6.0;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      u[i] += s * (v[i] + 2.0 * v2_[i] + 2.0 * v3_[i] + v4_[i]);
      v[i] += s * (a1_[i] + 2.0 * a2_[i] + 2.0 * a3_[i] + a4_[i]);
    }
  }

 private:
  const LatticeModel& model_;
  std::size_t n_;
  std::vector<double> a1_, a2_, a3_, a4_, u_, v2_, v3_, v4_;
};

}  // namespace

std::vector<cplx> gaussian_envelope(const LatticeSpec& spec, const WavepacketSpec& wp) {
  std::vector<cplx> env(static_cast<std::size_t>(spec.cells()));
  double norm = 0.0;
  for (int n = 0; n < spec.ny; ++n) {
    for (int m = 0; m < spec.nx; ++m) {
      const double dx = m - wp.x0;
      const double dy = spec.is_chain() ? 0.0 : n - wp.y0;
      const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * wp.sigma * wp.sigma));
      const double phase = wp.k0.kx * spec.a * m + (spec.is_chain() ? 0.0 : wp.k0.ky * spec.a * n);
      env[cell_index(spec, m, n)] = g * std::polar(1.0, phase);
      norm += g * g;
    }
  }
  const double s = 1.0 / std::sqrt(norm);
  for (auto& e : env) e *= s;
  return env;
}

std::vector<std::string> boundary_warnings(const LatticeSpec& spec, const WavepacketSpec& wp) {
  std::vector<std::string> w;
  if (spec.boundary != Boundary::fixed) return w;
  const double margin = 3.0 * wp.sigma;
  if (wp.x0 < margin || spec.nx - 1 - wp.x0 < margin) w.emplace_back("packet within 3 sigma of an x edge");
  if (!spec.is_chain() && (wp.y0 < margin || spec.ny - 1 - wp.y0 < margin)) {
    w.emplace_back("packet within 3 sigma of a y edge");
  }
  return w;
}

ClassicalPacket init_wavepacket_classical(const LatticeModel& model, const WavepacketSpec& wp) {
  const LatticeSpec& spec = model.spec();
  if (!(wp.sigma >= 4.0)) throw DomainError("wavepacket: sigma must be at least 4 cells");
  if (wp.branch != 0 && wp.branch != 1) throw DomainError("wavepacket: branch must be 0 or 1");
  if (std::abs(wp.k0.kx * spec.a) > pi || std::abs(wp.k0.ky * spec.a) > pi) {
    throw DomainError("wavepacket: carrier outside the Brillouin zone");
  }
  ClassicalPacket out;
  const int cm = nearest_cell(wp.x0, spec.nx);
  const int cn = spec.is_chain() ? 0 : nearest_cell(wp.y0, spec.ny);
  out.local_tilt = model.potential().at(cm, cn);
  const auto eig = quadratic_eigensolve(bloch_matrices(spec, out.local_tilt, wp.k0));
  if (std::abs(eig[3].omega - eig[2].omega) < 1e-9) {
    throw DomainError("wavepacket: positive branches are degenerate at k0");
  }
  const Eigenpair& e = eig[2 + wp.branch];
  if (std::abs(e.omega.imag()) > 1e-9 || e.omega.real() <= 0) {
    throw DomainError("wavepacket: selected branch is not a real positive frequency");
  }
  out.omega0 = e.omega.real();
  out.mode = e.mode;
  out.warnings = boundary_warnings(spec, wp);

  const auto env = gaussian_envelope(spec, wp);
  const std::size_t n = static_cast<std::size_t>(spec.sites());
  out.state.u.assign(n, 0.0);
  out.state.v.assign(n, 0.0);
  for (std::size_t c = 0; c < env.size(); ++c) {
    for (int s = 0; s < 2; ++s) {
      const cplx psi = wp.amplitude * env[c] * e.mode(s);
      out.state.u[2 * c + s] = psi.real();
      out.state.v[2 * c + s] = out.omega0 * psi.imag();
    }
  }
  return out;
}

FieldState rk4_step(const LatticeModel& model, const FieldState& state, double dt) {
  if (!(dt > 0)) throw DomainError("rk4_step: dt must be positive");
  FieldState next = state;
  Stepper st(model);
  st.step(next.u, next.v, dt);
  next.t = state.t + dt;
  check_finite(next.u, next.t);
  check_finite(next.v, next.t);
  return next;
}

double estimate_omega_max(const LatticeModel& model) {
  const LatticeSpec& spec = model.spec();
  const double vm = model.potential().max_magnitude();
  std::vector<Tilt> probes{{vm, 0.0}, {-vm, 0.0}};
  if (!spec.is_chain()) {
    probes.push_back({0.0, vm});
    probes.push_back({0.0, -vm});
  }
  double out = 0.0;
  for (const Tilt& t : probes) out = std::max(out, stability_scan(spec, t, 32).omega_max);
  return out;
}

Trajectory evolve(const LatticeModel& model, const FieldState& initial, const EvolveOptions& opt) {
  if (!(opt.dt > 0) || !(opt.t_end >= 0)) throw DomainError("evolve: need dt > 0 and t_end >= 0");
  const auto start = std::chrono::steady_clock::now();
  Trajectory tr;
  tr.omega_max = opt.omega_max > 0 ? opt.omega_max : estimate_omega_max(model);
  if (opt.check_dt && opt.dt > 0.2 / tr.omega_max) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "evolve: dt=%.4g exceeds 0.2/Omega_max=%.4g", opt.dt, 0.2 / tr.omega_max);
    throw DomainError(buf);
  }
  const long nsteps = std::lround(opt.t_end / opt.dt);
  std::vector<double> u = initial.u;
  std::vector<double> v = initial.v;
  FieldState cur{u, v, initial.t};
  tr.initial_energy = model.energy(cur);
  const double limit = 10.0 * std::max(std::abs(tr.initial_energy), 1e-300);
  Stepper st(model);

  auto record = [&](long step) {
    cur.u = u;
    cur.v = v;
    cur.t = initial.t + step * opt.dt;
    if (opt.stride > 0 && step % opt.stride == 0) {
      tr.times.push_back(cur.t);
      tr.energy.push_back(model.energy(cur));
      tr.snapshots.push_back(cur);
    }
    if (opt.observer && opt.observe_every > 0 && step % opt.observe_every == 0) opt.observer(step, cur);
  };
  auto needs_state = [&](long step) {
    return (opt.stride > 0 && step % opt.stride == 0) ||
           (opt.observer && opt.observe_every > 0 && step % opt.observe_every == 0);
  };

  if (needs_state(0)) record(0);
  for (long s = 1; s <= nsteps; ++s) {
    st.step(u, v, opt.dt);
    if (s % 50 == 0 || s == nsteps) {
      check_finite(u, initial.t + s * opt.dt);
      check_finite(v, initial.t + s * opt.dt);
      const double e = model.energy({u, v, 0.0});
      if (std::abs(e) > limit) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "evolve: energy grew beyond 10x its initial value at t=%.6g",
                      initial.t + s * opt.dt);
        throw NumericalError(buf);
      }
    }
    if (needs_state(s)) record(s);
  }
  tr.final_state = {u, v, initial.t + nsteps * opt.dt};
  tr.final_energy = model.energy(tr.final_state);
  tr.steps = nsteps;
  tr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return tr;
}

std::vector<double> amplitude_sq(const FieldState& state, double omega_bar) {
  if (!(omega_bar > 0)) throw DomainError("amplitude_sq: carrier frequency must be positive");
  std::vector<double> d(state.u.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = state.v[i] / omega_bar;
    d[i] = state.u[i] * state.u[i] + w * w;
  }
  return d;
}

std::vector<double> cell_density(const std::vector<double>& site_density) {
  std::vector<double> c(site_density.size() / 2);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = site_density[2 * i] + site_density[2 * i + 1];
  return c;
}

Spectrum1d spatial_spectrum(const std::vector<cplx>& field, int nk) {
  if (nk < 1) throw DomainError("spatial_spectrum: nk must be positive");
  Spectrum1d s;
  s.k.resize(static_cast<std::size_t>(nk));
  s.magnitude.resize(static_cast<std::size_t>(nk));
  double peak = 0.0;
  for (int j = 0; j < nk; ++j) {
    const double k = -pi + 2.0 * pi * j / nk;
    cplx acc = 0.0;
    for (std::size_t m = 0; m < field.size(); ++m) acc += field[m] * std::polar(1.0, -k * static_cast<double>(m));
    s.k[j] = k;
    s.magnitude[j] = std::abs(acc);
    peak = std::max(peak, s.magnitude[j]);
  }
  if (peak > 0) {
    for (auto& x : s.magnitude) x /= peak;
  }
  return s;
}

Spectrum1d spatial_spectrum(const std::vector<double>& field, int nk) {
  return spatial_spectrum(std::vector<cplx>(field.begin(), field.end()), nk);
}

Spectrum2d spatial_spectrum_2d(const std::vector<cplx>& field, int nx, int ny, int nk) {
  if (nk < 1) throw DomainError("spatial_spectrum_2d: nk must be positive");
  Spectrum2d s;
  s.nk = nk;
  s.k.resize(static_cast<std::size_t>(nk));
  for (int j = 0; j < nk; ++j) s.k[j] = -pi + 2.0 * pi * j / nk;
  // transform along x for each row, then along y
  std::vector<cplx> rows(static_cast<std::size_t>(nk) * ny);
  for (int n = 0; n < ny; ++n) {
    for (int j = 0; j < nk; ++j) {
      cplx acc = 0.0;
      for (int m = 0; m < nx; ++m) acc += field[m + nx * n] * std::polar(1.0, -s.k[j] * m);
      rows[j + static_cast<std::size_t>(nk) * n] = acc;
    }
  }
  s.magnitude.assign(static_cast<std::size_t>(nk) * nk, 0.0);
  double peak = 0.0;
  for (int jy = 0; jy < nk; ++jy) {
    for (int jx = 0; jx < nk; ++jx) {
      cplx acc = 0.0;
      for (int n = 0; n < ny; ++n) acc += rows[jx + static_cast<std::size_t>(nk) * n] * std::polar(1.0, -s.k[jy] * n);
      const double mag = std::abs(acc);
      s.magnitude[jx + static_cast<std::size_t>(nk) * jy] = mag;
      peak = std::max(peak, mag);
    }
  }
  if (peak > 0) {
    for (auto& x : s.magnitude) x /= peak;
  }
  return s;
}

}  // namespace horizon

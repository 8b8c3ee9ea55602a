#pragma once

#include "horizon/common.hpp"
#include "horizon/lattice.hpp"

#include <functional>
#include <string>
#include <vector>

namespace horizon {

struct WavepacketSpec {
  double x0 = 0.0;  // center, in cells
  double y0 = 0.0;
  double sigma = 10.0;
  Momentum k0;
  int branch = 0;  // 0: lower positive branch, 1: upper positive branch
  double amplitude = 1.0;
};

struct ClassicalPacket {
  FieldState state;
  double omega0 = 0.0;  // carrier frequency of the selected branch
  Vec2 mode;
  Tilt local_tilt;
  std::vector<std::string> warnings;
};

// Psi = A g(r) exp(i k0.r) eps(k0) with g a unit-norm Gaussian, so that
// sum |Psi|^2 = A^2; u = Re Psi, v = Re(-i Omega0 Psi).
ClassicalPacket init_wavepacket_classical(const LatticeModel& model, const WavepacketSpec& wp);

// Complex Gaussian envelope times exp(i k0.r), unit norm, one value per cell.
std::vector<cplx> gaussian_envelope(const LatticeSpec& spec, const WavepacketSpec& wp);

// Warnings for packets closer than 3 sigma to a fixed edge.
std::vector<std::string> boundary_warnings(const LatticeSpec& spec, const WavepacketSpec& wp);

// One classical fourth-order Runge-Kutta step of u' = v, v' = D u + G v.
FieldState rk4_step(const LatticeModel& model, const FieldState& state, double dt);

using ClassicalObserver = std::function<void(long step, const FieldState&)>;

struct EvolveOptions {
  double dt = 0.02;
  double t_end = 0.0;
  int stride = 0;          // snapshot every stride steps; 0 disables snapshots
  int observe_every = 0;   // observer call interval in steps; 0 disables
  ClassicalObserver observer;
  bool check_dt = true;    // enforce dt <= 0.2 / Omega_max
  double omega_max = 0.0;  // <= 0: estimated from the tilt field
};

struct Trajectory {
  std::vector<double> times;  // snapshot times
  std::vector<FieldState> snapshots;
  std::vector<double> energy;  // energy at each snapshot
  FieldState final_state;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  long steps = 0;
  double wall_seconds = 0.0;
  double omega_max = 0.0;
};

// Largest |Omega| of the pencil over the Brillouin zone for tilts up to the
// field's maximum magnitude, in any direction.
double estimate_omega_max(const LatticeModel& model);

Trajectory evolve(const LatticeModel& model, const FieldState& initial, const EvolveOptions& opt);

// u^2 + (v / omega_bar)^2 per site.
std::vector<double> amplitude_sq(const FieldState& state, double omega_bar);

// Sum over the two sublattices of each cell.
std::vector<double> cell_density(const std::vector<double>& site_density);

struct Spectrum1d {
  std::vector<double> k;
  std::vector<double> magnitude;  // peak normalized to 1
};

// Direct discrete Fourier transform along a chain at nk momenta in [-pi, pi).
Spectrum1d spatial_spectrum(const std::vector<cplx>& field, int nk);
Spectrum1d spatial_spectrum(const std::vector<double>& field, int nk);

struct Spectrum2d {
  int nk = 0;
  std::vector<double> k;          // axis values, shared by kx and ky
  std::vector<double> magnitude;  // index ikx + nk iky, peak normalized to 1
};

// Separable direct DFT of a field on an nx by ny grid (index m + nx n).
Spectrum2d spatial_spectrum_2d(const std::vector<cplx>& field, int nx, int ny, int nk);

}  // namespace horizon

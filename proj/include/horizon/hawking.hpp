#pragma once

#include "horizon/dynamics.hpp"
#include "horizon/geometry.hpp"
#include "horizon/potentials.hpp"

#include <string>
#include <vector>

namespace horizon {

enum class Which { classical, quantum, both };
std::string to_string(Which w);

struct PlateauRule {
  double sample = 1.0;   // time between samples of the left-region norm
  double window = 10.0;  // moving-average length
  double span = 50.0;    // look-back for the relative-change test
  double rel_change = 1e-3;
  double floor = 1e-4;   // ignore plateaus below floor * launch norm

  bool operator==(const PlateauRule&) const = default;
};

// Chain of N_L flat cells, an N_0 interface and N_R over-tilted cells. The
// classical tilt rises from 0 to 2 across the interface; the quantum field
// is the same samples with the opposite sign, which puts its lower band on
// the left-moving side.
struct HawkingConfig {
  int n_left = 800;
  int n_mid = 400;
  int n_right = 800;
  double gamma_t = 0.1;
  double x0 = 1600.0;
  double sigma = 100.0;
  double t_x = 1.0;
  double t_z = 1.0;
  double a = 1.0;
  double dt_classical = 0.04;
  double dt_quantum = 0.02;
  double t_end = 1845.0;
  std::vector<double> snapshot_times{198.0, 1174.0, 1845.0};
  std::vector<double> omegas{0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08};
  Which which = Which::both;
  PlateauRule plateau;
  int snapshot_stride = 0;  // extra snapshots every this many samples; 0 disables

  bool operator==(const HawkingConfig&) const = default;
  int cells() const { return n_left + n_mid + n_right; }
  double x_h() const { return n_left + 0.5 * n_mid; }
  LatticeSpec lattice() const;
  // Throws DomainError naming the offending field.
  void validate() const;
};

struct Rates {
  double gamma_h = 0.0;
  double gamma_s = 0.0;
};

// Gamma_H = exp(-2 pi w / g), Gamma_s = 1 / (1 + exp(2 pi w / g)).
Rates rates(double omega, double gamma_t);

struct PacketFrequency {
  double omega = 0.0;
  bool degenerate = false;  // packet sits on the crossing
};

// |Omega(k0) - Omega*| in quantum-equivalent units 2 |Omega - Omega*|, where
// the factor 2 maps the classical cone slope 1/2 onto the quantum slope 1.
PacketFrequency omega_of_packet_classical(const LatticeSpec& spec, Tilt V, Momentum k0, int branch);
// |E(k0) - E*| with the bands crossing at E* = 0.
PacketFrequency omega_of_packet_quantum(const LatticeSpec& spec, Tilt V, Momentum k0, int branch);

struct Carrier {
  double k0 = 0.0;
  double frequency = 0.0;  // Omega for the classical model, E for the quantum one
  double group_velocity = 0.0;
  int branch = 0;
};

// Left-moving carriers of the launch region at quantum-equivalent offset omega.
Carrier classical_carrier(const HawkingConfig& cfg, double omega);
Carrier quantum_carrier(const HawkingConfig& cfg, double omega);

// Flat-region momentum that carries the same conserved frequency leftward.
double classical_flat_momentum(const HawkingConfig& cfg, double frequency);
double quantum_flat_momentum(const HawkingConfig& cfg, double energy);

// Final density summed over the first n_left cells divided by the initial
// density summed over the last n_right cells. Densities are per site.
double chi(const std::vector<double>& final_density, const std::vector<double>& initial_density,
           int n_left, int n_right);

struct Plateau {
  double value = 0.0;  // smoothed left-region norm at the plateau
  double time = 0.0;
  bool found = false;
};

Plateau find_plateau(const std::vector<double>& times, const std::vector<double>& left_norm,
                     double launch_norm, const PlateauRule& rule);

struct SideResult {
  bool ran = false;
  bool valid = true;
  std::string problem;
  Carrier carrier;
  double chi = 0.0;
  double t_measure = 0.0;
  bool plateau = false;
  double launch_norm = 0.0;
  double edge_fraction = 0.0;  // density within 50 cells of either end at t_measure, over launch_norm
  double k_transmitted = 0.0;  // spectral peak of the flat-side field at t_measure
  double k_expected = 0.0;
  double conservation_drift = 0.0;  // relative energy (classical) or norm (quantum) change
  std::vector<double> times;      // left-norm samples
  std::vector<double> left_norm;  // normalized by launch_norm
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshots;  // cell densities
  double wall_seconds = 0.0;
};

struct TunnelingRecord {
  double omega = 0.0;
  Rates analytic;
  SideResult classical;
  SideResult quantum;
};

TunnelingRecord run_tunneling(const HawkingConfig& cfg, double omega);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_lo = 0.0;  // 95% confidence interval
  double slope_hi = 0.0;
  int points = 0;
};

// Least squares with a Student t interval; needs at least three points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SweepResult {
  std::vector<TunnelingRecord> records;  // in omega order
  LineFit fit_q;                         // ln chi_q against omega
  LineFit fit_c;
  double rank_corr_c = 0.0;  // Spearman of chi_c against omega
  double rank_corr_q = 0.0;
};

SweepResult sweep(const HawkingConfig& cfg);

}  // namespace horizon

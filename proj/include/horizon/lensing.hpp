#pragma once

#include "horizon/dynamics.hpp"
#include "horizon/geometry.hpp"

#include <limits>
#include <string>
#include <vector>

namespace horizon {

// Funnel hole at (cx, cy) with the packet launched from x0 along +x on the
// line y = cy + side b. The hole sits off the grid midline by side b / 2 so
// that the whole geometry for side = -1 is the mirror image of side = +1
// under y -> ny - 1 - y.
struct LensingConfig {
  int nx = 200;
  int ny = 200;
  double gamma = 20.0;
  double b = 30.0;
  int side = 1;
  double cx = 100.0;
  double x0 = 35.0;
  double sigma = 10.0;
  double k0 = 0.3;
  double t_x = 1.0;
  double t_y = 2.0;  // makes the cone isotropic, so the horizon is the circle r = gamma
  double t_z = 1.0;
  double r_cap = 2.0;
  double dt = 0.0;  // <= 0: largest step below 0.2 / Omega_max that divides the sample interval
  double t_end = 260.0;
  double sample = 1.0;
  double pre_window = 40.0;
  double post_window = 40.0;
  std::vector<double> snapshot_times{0.0, 130.0, 260.0};
  int snapshot_stride = 0;  // extra snapshots every this many samples; 0 disables

  bool operator==(const LensingConfig&) const = default;

  double cy() const { return 0.5 * (ny - 1) - 0.5 * side * b; }
  double y0() const { return cy() + side * b; }
  double r_s() const { return gamma; }
  LatticeSpec lattice() const;
  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Density-weighted mean cell coordinates over cells with mask != 0; an
// empty mask selects every cell.
Point centroid(const std::vector<double>& cell_density, int nx, int ny,
               const std::vector<unsigned char>& mask = {});

struct CentroidTrack {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> r;         // distance of the centroid to the hole center
  std::vector<double> captured;  // energy fraction inside r_s
  std::vector<double> edge;      // energy fraction within 3 cells of the grid edge
};

struct LensingRun {
  CentroidTrack track;
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshots;  // cell densities
  double omega0 = 0.0;
  double dt = 0.0;
  double omega_max = 0.0;
  double energy_drift = 0.0;
  double wall_seconds = 0.0;
  bool valid = true;
  std::string problem;
};

LensingRun run_lensing(const LensingConfig& cfg);

struct Deflection {
  double closest_approach = 0.0;
  double t_closest = 0.0;
  bool captured = false;    // centroid entered r < r_s
  bool defined = false;     // bending angle available
  double bending_deg = 0.0;  // positive toward the hole
  double captured_fraction = 0.0;
  double max_deviation = 0.0;  // largest distance from the incoming line
  Point v_in;
  Point v_out;
  std::string note;
};

Deflection deflection_metrics(const CentroidTrack& track, const LensingConfig& cfg);

// Bending angle against hole mass at fixed b and against b at fixed mass,
// on top of the [lens] settings.
struct LensSweepConfig {
  std::vector<double> gammas{10.0, 15.0, 20.0};
  std::vector<double> bs{30.0, 50.0, 80.0};
  double gamma_for_b = 20.0;
  double b_for_gamma = 30.0;
  bool straight = true;  // extra gamma = 0 run
  bool mirror = true;    // extra side = -1 runs at gamma_for_b for every b

  bool operator==(const LensSweepConfig&) const = default;
  void validate() const;
};

struct LensSweepEntry {
  double gamma = 0.0;
  double b = 0.0;
  int side = 1;
  LensingRun run;
  Deflection metrics;
};

// The gyroscopic coupling is not mirror symmetric, so the two tracks drift
// apart slowly; energy trapped inside r_s circulates with a preferred sense.
struct MirrorPair {
  double gamma = 0.0;
  double b = 0.0;
  bool captured = false;          // either centroid entered r_s
  double mismatch = 0.0;          // whole run
  double before_capture = 0.0;    // samples before either centroid entered r_s
};

struct LensSweepResult {
  std::vector<LensSweepEntry> entries;  // gamma sweep, b sweep, then extras, without repeats
  bool monotone_gamma = false;          // capture ranks above any finite angle
  bool antimonotone_b = false;
  double straight_deviation = -1.0;     // max deviation of the gamma = 0 run; < 0 when not run
  std::vector<MirrorPair> mirror;       // one per b when enabled
};

// Ordering key of a run: the bending angle, +inf when captured, NaN when
// the angle is undefined for any other reason.
double bending_rank(const Deflection& d);

LensSweepResult lens_sweep(const LensingConfig& base, const LensSweepConfig& sweep);

// Largest distance between a track and the mirror image y -> ny - 1 - y of
// another, over samples with t < t_max.
double mirror_mismatch(const CentroidTrack& a, const CentroidTrack& b, int ny,
                       double t_max = std::numeric_limits<double>::infinity());

}  // namespace horizon

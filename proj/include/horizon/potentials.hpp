#pragma once

#include "horizon/common.hpp"
#include "horizon/geometry.hpp"

#include <iosfwd>
#include <vector>

namespace horizon {

enum class Generator { zero, uniform, funnel, tanh_interface };

struct FunnelParams {
  double gamma = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double r_cap = 2.0;
  double v_max = 0.0;
};

struct TanhParams {
  double gamma_t = 0.0;
  double x_h = 0.0;
  double orientation = 1.0;  // sign of Vx; magnitude is 1 + tanh(gamma_t (x - x_h))
};

// Per-cell tilt components, cell index m + nx n. vt is the generator's
// magnitude, which differs from |(vx, vy)| only at a funnel center where the
// direction is undefined and set to zero.
struct PotentialField {
  int nx = 0;
  int ny = 0;
  std::vector<double> vx;
  std::vector<double> vy;
  std::vector<double> vt;
  Generator generator = Generator::zero;
  FunnelParams funnel;
  TanhParams tanh;
  Tilt uniform_value;
  bool center_outside = false;

  Tilt at(int m, int n) const { return {vx[m + nx * n], vy[m + nx * n]}; }
  double magnitude(int m, int n) const;
  double max_magnitude() const;
  bool is_uniform() const;
  // Same samples with the tilt direction reversed.
  PotentialField negated() const;
};

PotentialField zero_field(const LatticeSpec& spec);
PotentialField uniform_field(const LatticeSpec& spec, Tilt v);

// Tilt of magnitude min(gamma/r, v_max) pointing from each cell toward the
// center; r < r_cap is held at v_max. v_max <= 0 selects gamma / r_cap.
PotentialField funnel(const LatticeSpec& spec, double gamma, double cx, double cy,
                      double r_cap = 2.0, double v_max = 0.0);

// Vx = orientation (1 + tanh(gamma_t (m - x_h))), Vy = 0.
PotentialField tanh_interface(const LatticeSpec& spec, double gamma_t, double x_h,
                              double orientation = 1.0);

// Columns m, n, Vx, Vy.
void write_csv(std::ostream& os, const PotentialField& field);

}  // namespace horizon

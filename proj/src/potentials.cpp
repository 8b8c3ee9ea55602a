#include "horizon/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace horizon {

namespace {

PotentialField blank(const LatticeSpec& spec) {
  spec.validate();
  PotentialField f;
  f.nx = spec.nx;
  f.ny = spec.ny;
  f.vx.assign(static_cast<std::size_t>(spec.cells()), 0.0);
  f.vy.assign(static_cast<std::size_t>(spec.cells()), 0.0);
  f.vt.assign(static_cast<std::size_t>(spec.cells()), 0.0);
  return f;
}

}  // namespace

double PotentialField::magnitude(int m, int n) const { return vt[m + nx * n]; }

double PotentialField::max_magnitude() const {
  double out = 0.0;
  for (double x : vt) out = std::max(out, x);
  return out;
}

bool PotentialField::is_uniform() const {
  for (std::size_t i = 1; i < vx.size(); ++i) {
    if (vx[i] != vx[0] || vy[i] != vy[0]) return false;
  }
  return true;
}

PotentialField PotentialField::negated() const {
  PotentialField f = *this;
  for (auto& x : f.vx) x = -x;
  for (auto& y : f.vy) y = -y;
  f.tanh.orientation = -tanh.orientation;
  f.uniform_value = {-uniform_value.vx, -uniform_value.vy};
  return f;
}

PotentialField zero_field(const LatticeSpec& spec) { return blank(spec); }

PotentialField uniform_field(const LatticeSpec& spec, Tilt v) {
  PotentialField f = blank(spec);
  f.generator = Generator::uniform;
  f.uniform_value = v;
  std::fill(f.vx.begin(), f.vx.end(), v.vx);
  std::fill(f.vy.begin(), f.vy.end(), spec.is_chain() ? 0.0 : v.vy);
  f.uniform_value.vy = spec.is_chain() ? 0.0 : v.vy;
  std::fill(f.vt.begin(), f.vt.end(), std::hypot(v.vx, f.uniform_value.vy));
  return f;
}

PotentialField funnel(const LatticeSpec& spec, double gamma, double cx, double cy,
                      double r_cap, double v_max) {
  if (!(gamma >= 0) || !std::isfinite(gamma)) throw DomainError("funnel: gamma must be >= 0");
  if (!(r_cap > 0)) throw DomainError("funnel: r_cap must be positive");
  if (2.0 * gamma >= std::min(spec.nx, spec.ny) * 1.0) {
    throw DomainError("funnel: horizon radius gamma does not fit in the grid");
  }
  PotentialField f = blank(spec);
  f.generator = Generator::funnel;
  if (v_max <= 0) v_max = gamma / r_cap;
  f.funnel = {gamma, cx, cy, r_cap, v_max};
  f.center_outside = cx < 0 || cy < 0 || cx > spec.nx - 1 || cy > spec.ny - 1;
  for (int n = 0; n < spec.ny; ++n) {
    for (int m = 0; m < spec.nx; ++m) {
      const double dx = cx - m;
      const double dy = cy - n;
      const double r = std::hypot(dx, dy);
      const int c = cell_index(spec, m, n);
      const double vt = r >= r_cap ? std::min(gamma / r, v_max) : v_max;
      f.vt[c] = vt;
      if (r == 0.0) continue;  // direction undefined at the center
      f.vx[c] = vt * dx / r;
      f.vy[c] = vt * dy / r;
    }
  }
  return f;
}

PotentialField tanh_interface(const LatticeSpec& spec, double gamma_t, double x_h,
                              double orientation) {
  if (!(gamma_t > 0)) throw DomainError("tanh_interface: gamma_t must be positive");
  if (!(x_h > 0 && x_h < spec.nx)) throw DomainError("tanh_interface: x_h must lie inside the chain");
  if (orientation != 1.0 && orientation != -1.0) {
    throw DomainError("tanh_interface: orientation must be +1 or -1");
  }
  PotentialField f = blank(spec);
  f.generator = Generator::tanh_interface;
  f.tanh = {gamma_t, x_h, orientation};
  for (int n = 0; n < spec.ny; ++n) {
    for (int m = 0; m < spec.nx; ++m) {
      // 1 + tanh(z) written to keep relative accuracy on the flat side
      const double z = gamma_t * (m - x_h);
      const int c = cell_index(spec, m, n);
      f.vt[c] = 2.0 / (1.0 + std::exp(-2.0 * z));
      f.vx[c] = orientation * f.vt[c];
    }
  }
  return f;
}

void write_csv(std::ostream& os, const PotentialField& field) {
  os << "m,n,Vx,Vy\n";
  char buf[96];
  for (int n = 0; n < field.ny; ++n) {
    for (int m = 0; m < field.nx; ++m) {
      const Tilt t = field.at(m, n);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", m, n, t.vx, t.vy);
      os << buf;
    }
  }
}

}  // namespace horizon

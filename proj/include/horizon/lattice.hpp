#pragma once

#include "horizon/common.hpp"
#include "horizon/geometry.hpp"
#include "horizon/potentials.hpp"
#include "horizon/sparse.hpp"

#include <optional>
#include <vector>

namespace horizon {

enum class Signal { u, v };

struct FieldState {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;
};

// Passive spring. An empty neighbor means the spring is anchored to the
// clamped wall of a fixed boundary.
struct SpringEntry {
  SiteId site;
  std::optional<SiteId> neighbor;
  double stiffness = 0.0;
};

struct GainEntry {
  SiteId actuated;
  SiteId measured;
  Signal signal = Signal::u;
  double gain = 0.0;
};

// Closed-loop network with unit masses: u'' = D u + G v, where D collects the
// host springs and displacement gains and G the velocity gains.
class LatticeModel {
 public:
  LatticeModel(LatticeSpec spec, PotentialField field, std::vector<SpringEntry> host,
               std::vector<GainEntry> gains);

  const LatticeSpec& spec() const { return spec_; }
  const PotentialField& potential() const { return field_; }
  const std::vector<SpringEntry>& host_table() const { return host_; }
  const std::vector<GainEntry>& gain_table() const { return gains_; }
  const CsrMatrix<double>& displacement_operator() const { return d_; }
  const CsrMatrix<double>& velocity_operator() const { return g_; }

  int sites() const { return spec_.sites(); }

  // out[i] = (D u + G v)[i]
  void acceleration(const double* u, const double* v, double* out) const;
  std::vector<double> acceleration(const FieldState& state) const;

  // 1/2 v.v - 1/2 u.D u; conserved when G is antisymmetric.
  double energy(const FieldState& state) const;

  // max |G + G^T|; zero for bond-averaged tilt.
  double velocity_asymmetry() const;

 private:
  LatticeSpec spec_;
  PotentialField field_;
  std::vector<SpringEntry> host_;
  std::vector<GainEntry> gains_;
  CsrMatrix<double> d_;
  CsrMatrix<double> g_;
  CsrMatrix<double> op_;  // [D | G] acting on the stacked state (u, v)
};

LatticeModel build_lattice(const LatticeSpec& spec, const PotentialField& field);

struct BlochPencil {
  Mat2 M0 = Mat2::Zero();
  Mat2 M1 = Mat2::Zero();
  Momentum k;
  Tilt V;
};

// Plane waves u = eps exp(i(k.r - Omega t)) of the uniform-tilt network obey
// Omega^2 eps = (M0 + Omega M1) eps.
BlochPencil bloch_matrices(const LatticeSpec& spec, Tilt V, Momentum k);

struct StabilityReport {
  double max_imag = 0.0;
  double min_eig_m0 = 0.0;
  double omega_max = 0.0;
  Momentum worst_imag_k;
  Momentum worst_m0_k;
};

// Scan k_j = -pi/a + 2 pi j / (a res), j < res, per active direction.
StabilityReport stability_scan(const LatticeSpec& spec, Tilt V, int resolution);

}  // namespace horizon

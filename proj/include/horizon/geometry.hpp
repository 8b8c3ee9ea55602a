#pragma once

#include <string>

namespace horizon {

enum class Boundary { fixed, periodic };
enum class Dimensionality { chain1d, grid2d };

// Where a spatially varying tilt is read when it feeds a velocity gain.
// bond_average keeps the gyroscopic matrix antisymmetric; actuated_cell
// reads the tilt at the cell that receives the force.
enum class TiltSampling { bond_average, actuated_cell };

enum class Sublattice : int { A = 0, B = 1 };

struct LatticeSpec {
  int nx = 1;
  int ny = 1;
  double a = 1.0;
  double t_x = 1.0;
  double t_y = 1.0;
  double t_z = 1.0;
  double beta = -8.0;
  Boundary boundary = Boundary::fixed;
  Dimensionality dim = Dimensionality::grid2d;
  TiltSampling tilt_sampling = TiltSampling::bond_average;

  int cells() const { return nx * ny; }
  int sites() const { return 2 * nx * ny; }
  bool is_chain() const { return dim == Dimensionality::chain1d; }
  int dimension() const { return is_chain() ? 1 : 2; }

  // Throws DomainError on invalid geometry or couplings.
  void validate() const;

  static LatticeSpec chain(int n);
  static LatticeSpec grid(int nx, int ny);
};

struct SiteId {
  int m = 0;
  int n = 0;
  Sublattice s = Sublattice::A;
  bool operator==(const SiteId&) const = default;
};

inline int cell_index(const LatticeSpec& spec, int m, int n) { return m + spec.nx * n; }
inline int site_index(const LatticeSpec& spec, const SiteId& id) {
  return 2 * cell_index(spec, id.m, id.n) + static_cast<int>(id.s);
}
inline SiteId site_of(const LatticeSpec& spec, int index) {
  const int c = index / 2;
  return {c % spec.nx, c / spec.nx, index % 2 == 0 ? Sublattice::A : Sublattice::B};
}

std::string to_string(Boundary b);
std::string to_string(Dimensionality d);
std::string to_string(TiltSampling s);

}  // namespace horizon

#include "horizon/geometry.hpp"

#include "horizon/common.hpp"

#include <cmath>

namespace horizon {

Mat2 pauli(int j) {
  Mat2 s;
  switch (j) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw DomainError("pauli index out of range");
  }
  return s;
}

void LatticeSpec::validate() const {
  if (nx < 1 || ny < 1) throw DomainError("lattice needs nx >= 1 and ny >= 1");
  if (is_chain() && ny != 1) throw DomainError("chain1d lattice requires ny = 1");
  for (double x : {a, t_x, t_y, t_z, beta}) {
    if (!std::isfinite(x)) throw DomainError("lattice couplings must be finite");
  }
  if (a <= 0) throw DomainError("lattice constant a must be positive");
  if (t_z <= 0) throw DomainError("t_z must be positive");
}

LatticeSpec LatticeSpec::chain(int n) {
  LatticeSpec s;
  s.nx = n;
  s.ny = 1;
  s.dim = Dimensionality::chain1d;
  return s;
}

LatticeSpec LatticeSpec::grid(int nx, int ny) {
  LatticeSpec s;
  s.nx = nx;
  s.ny = ny;
  return s;
}

std::string to_string(Boundary b) { return b == Boundary::fixed ? "fixed" : "periodic"; }
std::string to_string(Dimensionality d) {
  return d == Dimensionality::chain1d ? "chain1d" : "grid2d";
}
std::string to_string(TiltSampling s) {
  return s == TiltSampling::bond_average ? "bond_average" : "actuated_cell";
}

}  // namespace horizon

#pragma once

#include "horizon/common.hpp"
#include "horizon/lattice.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace horizon {

struct Eigenpair {
  cplx omega;
  Vec2 mode;  // unit norm
};

// Roots of det(Omega^2 - Omega M1 - M0) from the companion [[0, I], [M0, M1]],
// sorted by real part then imaginary part. Throws NumericalError when a
// residual exceeds 1e-9 and DomainError on non-Hermitian input.
std::array<Eigenpair, 4> quadratic_eigensolve(const BlochPencil& p);

enum class TiltClass { untilted, under, critical, over };
std::string to_string(TiltClass c);

// Classification of the two cone slopes along one direction.
TiltClass classify_slopes(double s1, double s2, double tol = 1e-3);

struct SpectrumSample {
  Momentum k;
  std::array<cplx, 4> omega;           // sorted by real part
  std::array<int, 2> positive_branch;  // indices into omega, continued along the path
  std::array<double, 2> vgx;           // dOmega/dkx of the positive branches
  std::array<double, 2> vgy;
  TiltClass tilt_class = TiltClass::untilted;
};

// Positive branches are paired across the path by maximum mode overlap.
std::vector<SpectrumSample> band_path(const LatticeSpec& spec, Tilt V,
                                      const std::vector<Momentum>& path);

struct ConeParams {
  std::array<double, 2> slope_x;      // ascending
  std::array<double, 2> slope_y;      // ascending
  std::array<double, 2> slope_along;  // along V (x when V = 0), ascending
  TiltClass tilt_class = TiltClass::untilted;
  double omega_node = 0.0;
};

ConeParams cone_params(const LatticeSpec& spec, Tilt V, double dk = 1e-4);

// Frequency where the two positive branches touch.
double crossing_frequency(const LatticeSpec& spec, Tilt V);

// Columns k_x, k_y, ReOmega_1..4, ImOmega_1..4, class.
void write_band_csv(std::ostream& os, const std::vector<SpectrumSample>& samples);

}  // namespace horizon

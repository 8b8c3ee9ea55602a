#pragma once

#include "horizon/lattice.hpp"
#include "horizon/quantum.hpp"

namespace horizon {

// Bloch matrices recovered by applying the real-space operators to complex
// plane waves on a periodic lattice and projecting back onto the wave. The
// momentum must be commensurate with the lattice.
BlochPencil fit_classical_pencil(const LatticeModel& model, Momentum k);
Mat2 fit_quantum_bloch(const QuantumOperator& h, Momentum k);

// Commensurate momenta 2 pi j / (n a) nearest to the requested values.
Momentum commensurate(const LatticeSpec& spec, Momentum k);

struct OracleReport {
  double classical_rel_error = 0.0;  // worst over k and V, relative to max(1, |M|)
  double quantum_rel_error = 0.0;
  int k_points = 0;
  int tilts = 0;
};

// Compares fitted and closed-form Bloch matrices on a periodic n by n grid
// for each uniform tilt and a kn by kn set of commensurate momenta.
OracleReport bloch_oracle(int n, const std::vector<Tilt>& tilts, int kn);

}  // namespace horizon

#pragma once

#include "horizon/common.hpp"
#include "horizon/dynamics.hpp"
#include "horizon/geometry.hpp"
#include "horizon/potentials.hpp"
#include "horizon/sparse.hpp"

#include <functional>
#include <vector>

namespace horizon {

// Real-space tight-binding form of
// H(k) = sum_j t_j (sigma_j - V_j) sin k_j a + t_z (2 - cos k_x a - cos k_y a) sigma_z,
// with the tilt averaged over each bond so that H is Hermitian.
class QuantumOperator {
 public:
  QuantumOperator(LatticeSpec spec, CsrMatrix<cplx> h);

  const LatticeSpec& spec() const { return spec_; }
  const CsrMatrix<cplx>& matrix() const { return h_; }
  int sites() const { return spec_.sites(); }

  void apply(const cplx* psi, cplx* out) const { h_.multiply(psi, out); }
  double hermiticity_residual() const;
  // Largest absolute row sum, an upper bound on the spectral norm.
  double row_norm() const;

 private:
  LatticeSpec spec_;
  CsrMatrix<cplx> h_;
};

QuantumOperator build_hamiltonian(const LatticeSpec& spec, const PotentialField& field);

Mat2 bloch_hamiltonian(const LatticeSpec& spec, Tilt V, Momentum k);

struct QuantumState {
  std::vector<cplx> psi;
  double t = 0.0;
};

using QuantumObserver = std::function<void(long step, const QuantumState&)>;

struct SchrodingerOptions {
  double dt = 0.02;
  double t_end = 0.0;
  int observe_every = 0;
  QuantumObserver observer;
  double norm_tol = 1e-8;
};

struct QuantumRun {
  QuantumState final_state;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  long steps = 0;
  double wall_seconds = 0.0;
};

// Classical RK4 for i psi' = H psi. Requires dt * row_norm <= 0.1 and
// aborts when the norm drifts by more than norm_tol (relative).
QuantumRun schrodinger_evolve(const QuantumOperator& h, const QuantumState& psi0,
                              const SchrodingerOptions& opt);

struct QuantumPacket {
  QuantumState state;
  double energy = 0.0;
  Vec2 spinor;
  Tilt local_tilt;
  std::vector<std::string> warnings;
};

// branch 0: lower band, 1: upper band of the frozen local Bloch Hamiltonian.
QuantumPacket init_wavepacket_quantum(const LatticeSpec& spec, const PotentialField& field,
                                      const WavepacketSpec& wp);

std::vector<double> probability(const QuantumState& s);  // |psi|^2 per site

}  // namespace horizon

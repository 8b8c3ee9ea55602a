#include "horizon/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace horizon {

namespace {

constexpr cplx I{0.0, 1.0};

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

// Column s of the Bloch matrix of a real operator: apply it to the plane wave
// living on sublattice s and project every cell back onto the wave.
Mat2 project_real(const LatticeSpec& spec, const CsrMatrix<double>& op, Momentum k) {
  const int n = spec.sites();
  std::vector<double> re(n), im(n), ore(n), oim(n);
  Mat2 out = Mat2::Zero();
  for (int s = 0; s < 2; ++s) {
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (int c = 0; c < spec.cells(); ++c) {
      const int m = c % spec.nx, nn = c / spec.nx;
      const double ph = (k.kx * m + k.ky * nn) * spec.a;
      re[2 * c + s] = std::cos(ph);
      im[2 * c + s] = std::sin(ph);
    }
    op.multiply(re.data(), ore.data());
    op.multiply(im.data(), oim.data());
    for (int r = 0; r < 2; ++r) {
      cplx acc = 0.0;
      for (int c = 0; c < spec.cells(); ++c) {
        const int m = c % spec.nx, nn = c / spec.nx;
        const double ph = (k.kx * m + k.ky * nn) * spec.a;
        acc += std::exp(-I * ph) * cplx(ore[2 * c + r], oim[2 * c + r]);
      }
      out(r, s) = acc / static_cast<double>(spec.cells());
    }
  }
  return out;
}

}  // namespace

Momentum commensurate(const LatticeSpec& spec, Momentum k) {
  const double qx = 2.0 * pi / (spec.nx * spec.a);
  const double qy = 2.0 * pi / (spec.ny * spec.a);
  Momentum out{qx * std::round(k.kx / qx), spec.is_chain() ? 0.0 : qy * std::round(k.ky / qy)};
  return out;
}

BlochPencil fit_classical_pencil(const LatticeModel& model, Momentum k) {
  const LatticeSpec& spec = model.spec();
  if (spec.boundary != Boundary::periodic) throw DomainError("fit_classical_pencil: lattice must be periodic");
  BlochPencil p;
  p.k = k;
  p.M0 = -project_real(spec, model.displacement_operator(), k);
  p.M1 = I * project_real(spec, model.velocity_operator(), k);
  return p;
}

Mat2 fit_quantum_bloch(const QuantumOperator& h, Momentum k) {
  const LatticeSpec& spec = h.spec();
  if (spec.boundary != Boundary::periodic) throw DomainError("fit_quantum_bloch: lattice must be periodic");
  const int n = spec.sites();
  std::vector<cplx> in(n), out(n);
  Mat2 res = Mat2::Zero();
  for (int s = 0; s < 2; ++s) {
    std::fill(in.begin(), in.end(), cplx(0.0));
    for (int c = 0; c < spec.cells(); ++c) {
      const int m = c % spec.nx, nn = c / spec.nx;
      in[2 * c + s] = std::exp(I * ((k.kx * m + k.ky * nn) * spec.a));
    }
    h.apply(in.data(), out.data());
    for (int r = 0; r < 2; ++r) {
      cplx acc = 0.0;
      for (int c = 0; c < spec.cells(); ++c) acc += std::conj(in[2 * c + s]) * out[2 * c + r];
      res(r, s) = acc / static_cast<double>(spec.cells());
    }
  }
  return res;
}

OracleReport bloch_oracle(int n, const std::vector<Tilt>& tilts, int kn) {
  if (n < 3 || kn < 1) throw DomainError("bloch_oracle: need n >= 3 and kn >= 1");
  LatticeSpec spec = LatticeSpec::grid(n, n);
  spec.boundary = Boundary::periodic;
  OracleReport rep;
  rep.tilts = static_cast<int>(tilts.size());
  rep.k_points = kn * kn;
  for (const Tilt& V : tilts) {
    const PotentialField field = uniform_field(spec, V);
    const LatticeModel model = build_lattice(spec, field);
    const QuantumOperator h = build_hamiltonian(spec, field);
    for (int i = 0; i < kn; ++i) {
      for (int j = 0; j < kn; ++j) {
        const Momentum k = commensurate(
            spec, {-pi + 2.0 * pi * (i + 0.5) / kn, -pi + 2.0 * pi * (j + 0.5) / kn});
        const BlochPencil fit = fit_classical_pencil(model, k);
        const BlochPencil ref = bloch_matrices(spec, V, k);
        const double e0 = max_abs(fit.M0 - ref.M0) / std::max(1.0, max_abs(ref.M0));
        const double e1 = max_abs(fit.M1 - ref.M1) / std::max(1.0, max_abs(ref.M1));
        rep.classical_rel_error = std::max({rep.classical_rel_error, e0, e1});
        const Mat2 hq = bloch_hamiltonian(spec, V, k);
        const double eq = max_abs(fit_quantum_bloch(h, k) - hq) / std::max(1.0, max_abs(hq));
        rep.quantum_rel_error = std::max(rep.quantum_rel_error, eq);
      }
    }
  }
  return rep;
}

}  // namespace horizon

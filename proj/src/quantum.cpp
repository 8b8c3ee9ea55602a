#include "horizon/quantum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace horizon {

namespace {

constexpr cplx I{0.0, 1.0};

double norm2(const std::vector<cplx>& x) {
  double s = 0.0;
  for (const cplx& c : x) s += std::norm(c);
  return std::sqrt(s);
}

cplx times_minus_i(cplx z) { return {z.imag(), -z.real()}; }

}  // namespace

QuantumOperator::QuantumOperator(LatticeSpec spec, CsrMatrix<cplx> h) : spec_(std::move(spec)), h_(std::move(h)) {}

double QuantumOperator::hermiticity_residual() const {
  double worst = 0.0;
  for (int r = 0; r < h_.rows(); ++r) {
    for (int p = h_.row_begin(r); p < h_.row_end(r); ++p) {
      worst = std::max(worst, std::abs(h_.value_at(p) - std::conj(h_.coeff(h_.col_at(p), r))));
    }
  }
  return worst;
}

double QuantumOperator::row_norm() const {
  double worst = 0.0;
  for (int r = 0; r < h_.rows(); ++r) {
    double s = 0.0;
    for (int p = h_.row_begin(r); p < h_.row_end(r); ++p) s += std::abs(h_.value_at(p));
    worst = std::max(worst, s);
  }
  return worst;
}

QuantumOperator build_hamiltonian(const LatticeSpec& spec, const PotentialField& field) {
  spec.validate();
  if (field.nx != spec.nx || field.ny != spec.ny) {
    throw DomainError("build_hamiltonian: potential field size does not match the lattice");
  }
  std::vector<Triplet<cplx>> t;
  const int dim = spec.dimension();
  struct Dir {
    int dm, dn;
  };
  std::vector<Dir> dirs{{1, 0}, {-1, 0}};
  if (!spec.is_chain()) {
    dirs.push_back({0, 1});
    dirs.push_back({0, -1});
  }
  for (int n = 0; n < spec.ny; ++n) {
    for (int m = 0; m < spec.nx; ++m) {
      const int a = site_index(spec, {m, n, Sublattice::A});
      const int b = site_index(spec, {m, n, Sublattice::B});
      t.push_back({a, a, dim * spec.t_z});
      t.push_back({b, b, -dim * spec.t_z});
      for (const Dir& d : dirs) {
        int mm = m + d.dm, nn = n + d.dn;
        if (spec.boundary == Boundary::periodic) {
          mm = (mm % spec.nx + spec.nx) % spec.nx;
          nn = (nn % spec.ny + spec.ny) % spec.ny;
        } else if (mm < 0 || mm >= spec.nx || nn < 0 || nn >= spec.ny) {
          continue;
        }
        const int qa = site_index(spec, {mm, nn, Sublattice::A});
        const int qb = site_index(spec, {mm, nn, Sublattice::B});
        const double sgn = d.dm + d.dn;
        const bool y = d.dn != 0;
        const double tj = y ? spec.t_y : spec.t_x;
        const Tilt here = field.at(m, n), there = field.at(mm, nn);
        const double vbar = 0.5 * (y ? here.vy + there.vy : here.vx + there.vx);
        // sigma_z cosine part
        t.push_back({a, qa, -spec.t_z / 2.0});
        t.push_back({b, qb, spec.t_z / 2.0});
        // tilt: -t_j V_j sin k_j on both sublattices
        const cplx tilt = sgn * I * tj * vbar / 2.0;
        t.push_back({a, qa, tilt});
        t.push_back({b, qb, tilt});
        if (y) {
          t.push_back({a, qb, -sgn * spec.t_y / 2.0});
          t.push_back({b, qa, sgn * spec.t_y / 2.0});
        } else {
          t.push_back({a, qb, -sgn * I * spec.t_x / 2.0});
          t.push_back({b, qa, -sgn * I * spec.t_x / 2.0});
        }
      }
    }
  }
  QuantumOperator op(spec, CsrMatrix<cplx>::from_triplets(spec.sites(), spec.sites(), std::move(t)));
  const double res = op.hermiticity_residual();
  if (res > 1e-12) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "build_hamiltonian: Hermiticity residual %.3e", res);
    throw NumericalError(buf);
  }
  return op;
}

Mat2 bloch_hamiltonian(const LatticeSpec& spec, Tilt V, Momentum k) {
  const double kx = k.kx * spec.a;
  const double ky = spec.is_chain() ? 0.0 : k.ky * spec.a;
  Mat2 h = spec.t_x * (pauli(1) - V.vx * pauli(0)) * std::sin(kx);
  if (spec.is_chain()) {
    h += spec.t_z * (1.0 - std::cos(kx)) * pauli(3);
  } else {
    h += spec.t_y * (pauli(2) - V.vy * pauli(0)) * std::sin(ky);
    h += spec.t_z * (2.0 - std::cos(kx) - std::cos(ky)) * pauli(3);
  }
  return h;
}

QuantumRun schrodinger_evolve(const QuantumOperator& h, const QuantumState& psi0, const SchrodingerOptions& opt) {
  if (!(opt.dt > 0) || !(opt.t_end >= 0)) throw DomainError("schrodinger_evolve: need dt > 0 and t_end >= 0");
  const double hn = h.row_norm();
  if (opt.dt * hn > 0.1 + 1e-12) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "schrodinger_evolve: dt*|H| = %.4g exceeds 0.1", opt.dt * hn);
    throw DomainError(buf);
  }
  const auto start = std::chrono::steady_clock::now();
  const long n = static_cast<long>(psi0.psi.size());
  std::vector<cplx> psi = psi0.psi, k1(n), k2(n), k3(n), k4(n), tmp(n);
  QuantumRun run;
  run.initial_norm = norm2(psi);
  const long nsteps = std::lround(opt.t_end / opt.dt);
  const double dt = opt.dt;

  QuantumState view;
  auto observe = [&](long s) {
    if (opt.observer && opt.observe_every > 0 && s % opt.observe_every == 0) {
      view.psi = psi;
      view.t = psi0.t + s * dt;
      opt.observer(s, view);
    }
  };
  observe(0);
  for (long s = 1; s <= nsteps; ++s) {
    h.apply(psi.data(), k1.data());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      k1[i] = times_minus_i(k1[i]);
      tmp[i] = psi[i] + 0.5 * dt * k1[i];
    }
    h.apply(tmp.data(), k2.data());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      k2[i] = times_minus_i(k2[i]);
      tmp[i] = psi[i] + 0.5 * dt * k2[i];
    }
    h.apply(tmp.data(), k3.data());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      k3[i] = times_minus_i(k3[i]);
      tmp[i] = psi[i] + dt * k3[i];
    }
    h.apply(tmp.data(), k4.data());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      k4[i] = times_minus_i(k4[i]);
      psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    observe(s);
  }
  run.final_norm = norm2(psi);
  run.final_state = {std::move(psi), psi0.t + nsteps * dt};
  run.steps = nsteps;
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double drift = std::abs(run.final_norm - run.initial_norm) / std::max(run.initial_norm, 1e-300);
  if (run.initial_norm > 0 && drift > opt.norm_tol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "schrodinger_evolve: norm drift %.3e exceeds tolerance", drift);
    throw NumericalError(buf);
  }
  return run;
}

QuantumPacket init_wavepacket_quantum(const LatticeSpec& spec, const PotentialField& field, const WavepacketSpec& wp) {
  if (!(wp.sigma >= 4.0)) throw DomainError("wavepacket: sigma must be at least 4 cells");
  if (wp.branch != 0 && wp.branch != 1) throw DomainError("wavepacket: branch must be 0 or 1");
  QuantumPacket out;
  const int cm = std::clamp(static_cast<int>(std::lround(wp.x0)), 0, spec.nx - 1);
  const int cn = spec.is_chain() ? 0 : std::clamp(static_cast<int>(std::lround(wp.y0)), 0, spec.ny - 1);
  out.local_tilt = field.at(cm, cn);
  Eigen::SelfAdjointEigenSolver<Mat2> es(bloch_hamiltonian(spec, out.local_tilt, wp.k0));
  if (es.eigenvalues()(1) - es.eigenvalues()(0) < 1e-12) {
    throw DomainError("wavepacket: bands are degenerate at k0");
  }
  const int pick = wp.branch;
  out.energy = es.eigenvalues()(pick);
  out.spinor = es.eigenvectors().col(pick).normalized();
  out.warnings = boundary_warnings(spec, wp);
  const auto env = gaussian_envelope(spec, wp);
  out.state.psi.assign(static_cast<std::size_t>(spec.sites()), 0.0);
  for (std::size_t c = 0; c < env.size(); ++c) {
    out.state.psi[2 * c] = wp.amplitude * env[c] * out.spinor(0);
    out.state.psi[2 * c + 1] = wp.amplitude * env[c] * out.spinor(1);
  }
  return out;
}

std::vector<double> probability(const QuantumState& s) {
  std::vector<double> p(s.psi.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(s.psi[i]);
  return p;
}

}  // namespace horizon

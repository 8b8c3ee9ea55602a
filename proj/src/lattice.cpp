#include "horizon/lattice.hpp"

#include "horizon/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace horizon {

namespace {

struct Dir {
  int dm;
  int dn;
  int sgn() const { return dm + dn; }
  bool along_y() const { return dn != 0; }
};

std::vector<Dir> directions(const LatticeSpec& spec) {
  std::vector<Dir> d{{1, 0}, {-1, 0}};
  if (!spec.is_chain()) {
    d.push_back({0, 1});
    d.push_back({0, -1});
  }
  return d;
}

std::optional<std::pair<int, int>> neighbor(const LatticeSpec& spec, int m, int n, Dir d) {
  int mm = m + d.dm;
  int nn = n + d.dn;
  if (spec.boundary == Boundary::periodic) {
    mm = (mm % spec.nx + spec.nx) % spec.nx;
    nn = (nn % spec.ny + spec.ny) % spec.ny;
    return std::make_pair(mm, nn);
  }
  if (mm < 0 || mm >= spec.nx || nn < 0 || nn >= spec.ny) return std::nullopt;
  return std::make_pair(mm, nn);
}

}  // namespace

LatticeModel::LatticeModel(LatticeSpec spec, PotentialField field, std::vector<SpringEntry> host,
                           std::vector<GainEntry> gains)
    : spec_(std::move(spec)), field_(std::move(field)), host_(std::move(host)), gains_(std::move(gains)) {
  const int n = spec_.sites();
  std::vector<Triplet<double>> dt, gt;
  dt.reserve(host_.size() * 4 + gains_.size());
  gt.reserve(gains_.size());
  for (const auto& s : host_) {
    const int i = site_index(spec_, s.site);
    dt.push_back({i, i, -s.stiffness});
    if (!s.neighbor) continue;
    const int j = site_index(spec_, *s.neighbor);
    dt.push_back({i, j, s.stiffness});
    dt.push_back({j, i, s.stiffness});
    dt.push_back({j, j, -s.stiffness});
  }
  for (const auto& g : gains_) {
    const int i = site_index(spec_, g.actuated);
    const int j = site_index(spec_, g.measured);
    (g.signal == Signal::u ? dt : gt).push_back({i, j, g.gain});
  }
  d_ = CsrMatrix<double>::from_triplets(n, n, std::move(dt));
  g_ = CsrMatrix<double>::from_triplets(n, n, std::move(gt));
}

void LatticeModel::acceleration(const double* u, const double* v, double* out) const {
  const int n = sites();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int p = d_.row_begin(r); p < d_.row_end(r); ++p) acc += d_.value_at(p) * u[d_.col_at(p)];
    for (int p = g_.row_begin(r); p < g_.row_end(r); ++p) acc += g_.value_at(p) * v[g_.col_at(p)];
    out[r] = acc;
  }
}

std::vector<double> LatticeModel::acceleration(const FieldState& state) const {
  if (state.u.size() != static_cast<std::size_t>(sites()) || state.v.size() != state.u.size()) {
    throw DomainError("acceleration: state size does not match the lattice");
  }
  std::vector<double> out(state.u.size());
  acceleration(state.u.data(), state.v.data(), out.data());
  return out;
}

double LatticeModel::energy(const FieldState& state) const {
  std::vector<double> du(state.u.size());
  d_.multiply(state.u.data(), du.data());
  double kinetic = 0.0, potential = 0.0;
  for (std::size_t i = 0; i < du.size(); ++i) {
    kinetic += state.v[i] * state.v[i];
    potential -= state.u[i] * du[i];
  }
  return 0.5 * (kinetic + potential);
}

double LatticeModel::velocity_asymmetry() const {
  double worst = 0.0;
  for (int r = 0; r < g_.rows(); ++r) {
    for (int p = g_.row_begin(r); p < g_.row_end(r); ++p) {
      worst = std::max(worst, std::abs(g_.value_at(p) + g_.coeff(g_.col_at(p), r)));
    }
  }
  return worst;
}

LatticeModel build_lattice(const LatticeSpec& spec, const PotentialField& field) {
  spec.validate();
  if (field.nx != spec.nx || field.ny != spec.ny ||
      field.vx.size() != static_cast<std::size_t>(spec.cells())) {
    throw DomainError("build_lattice: potential field size does not match the lattice");
  }
  const auto dirs = directions(spec);
  const double kappa = spec.t_z / 2.0;
  std::vector<SpringEntry> host;
  std::vector<GainEntry> gains;

  auto add = [&gains](SiteId to, SiteId from, Signal s, double g) {
    if (g == 0.0) return;
    if (!std::isfinite(g)) throw DomainError("build_lattice: non-finite gain");
    gains.push_back({to, from, s, g});
  };

  const double self_a = spec.beta / 2.0;
  const double self_b = (spec.beta + 4.0 * spec.dimension() * spec.t_z) / 2.0;

  for (int n = 0; n < spec.ny; ++n) {
    for (int m = 0; m < spec.nx; ++m) {
      const SiteId a{m, n, Sublattice::A};
      const SiteId b{m, n, Sublattice::B};

      for (const Dir& d : dirs) {
        const auto q = neighbor(spec, m, n, d);
        for (SiteId s : {a, b}) {
          if (!q) {
            host.push_back({s, std::nullopt, kappa});
          } else if (d.sgn() > 0) {
            host.push_back({s, SiteId{q->first, q->second, s.s}, kappa});
          }
        }
      }

      add(a, a, Signal::u, self_a);
      add(b, b, Signal::u, self_b);

      for (const Dir& d : dirs) {
        const auto q = neighbor(spec, m, n, d);
        if (!q) continue;
        const SiteId qa{q->first, q->second, Sublattice::A};
        const SiteId qb{q->first, q->second, Sublattice::B};
        const double sgn = d.sgn();
        const Tilt here = field.at(m, n);
        const Tilt there = field.at(q->first, q->second);
        const double v_here = d.along_y() ? here.vy : here.vx;
        const double v_there = d.along_y() ? there.vy : there.vx;
        const double v = spec.tilt_sampling == TiltSampling::bond_average ? 0.5 * (v_here + v_there)
                                                                           : v_here;
        if (d.along_y()) {
          add(a, qb, Signal::u, sgn * spec.t_y / 2.0);
          add(b, qa, Signal::u, -sgn * spec.t_y / 2.0);
        } else {
          add(a, qb, Signal::v, sgn * spec.t_x / 2.0);
          add(b, qa, Signal::v, sgn * spec.t_x / 2.0);
        }
        add(a, qa, Signal::v, -sgn * v / 2.0);
        add(b, qb, Signal::v, -sgn * v / 2.0);
        add(b, qb, Signal::u, -spec.t_z);
      }
    }
  }
  return LatticeModel(spec, field, std::move(host), std::move(gains));
}

BlochPencil bloch_matrices(const LatticeSpec& spec, Tilt V, Momentum k) {
  const double kx = k.kx * spec.a;
  const double ky = spec.is_chain() ? 0.0 : k.ky * spec.a;
  const double vy = spec.is_chain() ? 0.0 : V.vy;
  const double band = spec.is_chain() ? 1.0 - std::cos(kx) : 2.0 - std::cos(kx) - std::cos(ky);
  BlochPencil p;
  p.k = k;
  p.V = V;
  p.M0 = -(spec.beta / 2.0) * pauli(0) + spec.t_z * band * pauli(3);
  if (!spec.is_chain()) p.M0 += spec.t_y * std::sin(ky) * pauli(2);
  p.M1 = (V.vx * std::sin(kx) + vy * std::sin(ky)) * pauli(0) - spec.t_x * std::sin(kx) * pauli(1);
  return p;
}

StabilityReport stability_scan(const LatticeSpec& spec, Tilt V, int resolution) {
  if (resolution < 1) throw DomainError("stability_scan: resolution must be positive");
  StabilityReport rep;
  rep.min_eig_m0 = std::numeric_limits<double>::infinity();
  const int ny = spec.is_chain() ? 1 : resolution;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < ny; ++j) {
      Momentum k{(-pi + 2.0 * pi * i / resolution) / spec.a,
                 spec.is_chain() ? 0.0 : (-pi + 2.0 * pi * j / resolution) / spec.a};
      const BlochPencil p = bloch_matrices(spec, V, k);
      for (const auto& e : quadratic_eigensolve(p)) {
        if (std::abs(e.omega.imag()) > rep.max_imag) {
          rep.max_imag = std::abs(e.omega.imag());
          rep.worst_imag_k = k;
        }
        rep.omega_max = std::max(rep.omega_max, std::abs(e.omega));
      }
      Eigen::SelfAdjointEigenSolver<Mat2> es(p.M0, Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) < rep.min_eig_m0) {
        rep.min_eig_m0 = es.eigenvalues()(0);
        rep.worst_m0_k = k;
      }
    }
  }
  return rep;
}

}  // namespace horizon

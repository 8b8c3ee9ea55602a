#include "horizon/lattice.hpp"
#include "horizon/oracles.hpp"
#include "horizon/potentials.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace horizon;

namespace {

// Closed-form pencil written out independently of the library.
BlochPencil pencil_by_hand(const LatticeSpec& s, Tilt V, Momentum k) {
  const Mat2 I = Mat2::Identity();
  Mat2 sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;
  const double sxk = std::sin(k.kx * s.a), syk = std::sin(k.ky * s.a);
  const double hz = s.is_chain() ? s.t_z * (1 - std::cos(k.kx * s.a))
                                 : s.t_z * (2 - std::cos(k.kx * s.a) - std::cos(k.ky * s.a));
  BlochPencil p;
  p.M0 = -0.5 * s.beta * I + hz * sz + (s.is_chain() ? 0.0 : s.t_y * syk) * sy;
  p.M1 = (V.vx * sxk + (s.is_chain() ? 0.0 : V.vy * syk)) * I - s.t_x * sxk * sx;
  return p;
}

double dense_asymmetry(const CsrMatrix<double>& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  std::vector<double> e(m.cols()), col(m.rows());
  for (int j = 0; j < m.cols(); ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    m.multiply(e.data(), col.data());
    for (int i = 0; i < m.rows(); ++i) d(i, j) = col[i];
  }
  return (d + d.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("spec validation rejects bad geometry") {
  LatticeSpec s = LatticeSpec::grid(4, 4);
  CHECK_NOTHROW(s.validate());
  s.nx = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = LatticeSpec::grid(4, 4);
  s.a = -1;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("site indexing round-trips") {
  const LatticeSpec s = LatticeSpec::grid(5, 3);
  for (int i = 0; i < s.sites(); ++i) CHECK(site_index(s, site_of(s, i)) == i);
}

TEST_CASE("funnel magnitude is gamma over r and points at the center") {
  const LatticeSpec s = LatticeSpec::grid(40, 40);
  const PotentialField f = funnel(s, 10.0, 20.0, 20.0, 2.0);
  CHECK(f.magnitude(30, 20) == doctest::Approx(1.0));  // r = gamma
  CHECK(f.magnitude(20, 25) == doctest::Approx(2.0));
  const Tilt t = f.at(30, 20);
  CHECK(t.vx == doctest::Approx(-1.0));
  CHECK(t.vy == doctest::Approx(0.0));
  CHECK(f.magnitude(21, 20) == doctest::Approx(5.0));  // held at gamma / r_cap inside r_cap
}

TEST_CASE("tanh interface runs from 0 to 2 with 1 at the horizon") {
  const LatticeSpec s = LatticeSpec::chain(2000);
  const PotentialField f = tanh_interface(s, 0.1, 1000.0);
  CHECK(f.at(1000, 0).vx == doctest::Approx(1.0));
  CHECK(f.at(0, 0).vx < 1e-12);
  CHECK(f.at(1999, 0).vx == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.negated().at(1500, 0).vx == doctest::Approx(-f.at(1500, 0).vx));
}

TEST_CASE("closed-form pencil matches the hand-written Bloch matrices") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    LatticeSpec s = trial % 2 ? LatticeSpec::chain(8) : LatticeSpec::grid(8, 8);
    s.t_x = 1 + 0.2 * std::abs(u(rng));
    s.t_y = 1 + 0.2 * std::abs(u(rng));
    const Tilt V{u(rng), u(rng)};
    const Momentum k{u(rng), u(rng)};
    const BlochPencil a = bloch_matrices(s, V, k);
    const BlochPencil b = pencil_by_hand(s, V, k);
    CHECK((a.M0 - b.M0).norm() < 1e-13);
    CHECK((a.M1 - b.M1).norm() < 1e-13);
  }
}

TEST_CASE("real-space operator reproduces the pencil on a periodic grid") {
  LatticeSpec s = LatticeSpec::grid(12, 12);
  s.boundary = Boundary::periodic;
  for (const Tilt V : {Tilt{0, 0}, Tilt{0.5, 0}, Tilt{1.3, -0.7}}) {
    const LatticeModel m = build_lattice(s, uniform_field(s, V));
    for (int j = 0; j < 6; ++j) {
      const Momentum k = commensurate(s, {-2.5 + 0.9 * j, 1.7 - 0.6 * j});
      const BlochPencil fit = fit_classical_pencil(m, k);
      const BlochPencil ref = pencil_by_hand(s, V, k);
      CHECK((fit.M0 - ref.M0).norm() < 1e-12);
      CHECK((fit.M1 - ref.M1).norm() < 1e-12);
    }
  }
}

TEST_CASE("velocity gains stay antisymmetric for any smooth tilt field") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const LatticeSpec s = LatticeSpec::grid(10, 9);
    const PotentialField f = funnel(s, 0.5 + 2 * u(rng), 3 + 4 * u(rng), 3 + 3 * u(rng));
    const LatticeModel m = build_lattice(s, f);
    CHECK(m.velocity_asymmetry() < 1e-14);
    CHECK(dense_asymmetry(m.velocity_operator()) < 1e-14);
  }
}

TEST_CASE("host stiffness with wall anchors is positive semidefinite") {
  for (const LatticeSpec s : {LatticeSpec::grid(7, 6), LatticeSpec::chain(30)}) {
    const LatticeModel m = build_lattice(s, zero_field(s));
    const auto& d = m.displacement_operator();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(d.rows(), d.cols());
    std::vector<double> e(d.cols()), col(d.rows());
    for (int j = 0; j < d.cols(); ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[j] = 1.0;
      d.multiply(e.data(), col.data());
      for (int i = 0; i < d.rows(); ++i) dense(i, j) = col[i];
    }
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-dense);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("stability boundary at beta = -8 t_z") {
  LatticeSpec s = LatticeSpec::grid(4, 4);
  const StabilityReport ok = stability_scan(s, {0, 0}, 64);
  CHECK(ok.max_imag < 1e-9);
  CHECK(ok.min_eig_m0 >= -1e-12);
  s.beta = -6.0;
  CHECK(stability_scan(s, {0, 0}, 64).min_eig_m0 < 0);
}

#include "horizon/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace horizon {

namespace {

using Mat4 = Eigen::Matrix4cd;

double hermitian_residual(const Mat2& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double overlap(const Vec2& a, const Vec2& b) { return std::abs(a.dot(b)); }

// Positive-branch pair at k, ordered to follow the reference modes.
std::array<Eigenpair, 2> follow(const std::array<Eigenpair, 4>& eig, const Vec2& ref0,
                                const Vec2& ref1) {
  const double keep = overlap(ref0, eig[2].mode) + overlap(ref1, eig[3].mode);
  const double swap = overlap(ref0, eig[3].mode) + overlap(ref1, eig[2].mode);
  if (swap > keep) return {eig[3], eig[2]};
  return {eig[2], eig[3]};
}

std::array<double, 2> sorted2(double a, double b) {
  return a <= b ? std::array<double, 2>{a, b} : std::array<double, 2>{b, a};
}

}  // namespace

std::array<Eigenpair, 4> quadratic_eigensolve(const BlochPencil& p) {
  const double tol = 1e-12 * std::max(1.0, std::max(p.M0.cwiseAbs().maxCoeff(), p.M1.cwiseAbs().maxCoeff()));
  if (hermitian_residual(p.M0) > tol || hermitian_residual(p.M1) > tol) {
    throw DomainError("quadratic_eigensolve: pencil matrices are not Hermitian");
  }
  std::array<Eigenpair, 4> out;
  if (p.M1.cwiseAbs().maxCoeff() <= tol) {
    // Omega^2 = eig(M0): exact, and avoids the sqrt(eps) splitting of the
    // companion form at a double root Omega = 0.
    Eigen::SelfAdjointEigenSolver<Mat2> hs(p.M0);
    for (int j = 0; j < 2; ++j) {
      const double lam = hs.eigenvalues()(j);
      const cplx w = lam >= 0 ? cplx(std::sqrt(lam), 0.0) : cplx(0.0, std::sqrt(-lam));
      out[2 * j] = {w, hs.eigenvectors().col(j)};
      out[2 * j + 1] = {-w, hs.eigenvectors().col(j)};
    }
  } else {
    Mat4 c = Mat4::Zero();
    c.block<2, 2>(0, 2) = Mat2::Identity();
    c.block<2, 2>(2, 0) = p.M0;
    c.block<2, 2>(2, 2) = p.M1;
    Eigen::ComplexEigenSolver<Mat4> es(c, true);
    if (es.info() != Eigen::Success) throw NumericalError("quadratic_eigensolve: eigensolver failed");
    for (int i = 0; i < 4; ++i) {
      const cplx w = es.eigenvalues()(i);
      Vec2 top = es.eigenvectors().col(i).head<2>();
      const Vec2 bottom = es.eigenvectors().col(i).tail<2>();
      // bottom = w top; prefer the better-conditioned half
      if (top.norm() < bottom.norm() && std::abs(w) > 1.0) top = bottom / w;
      out[i] = {w, top.normalized()};
    }
  }
  for (int i = 0; i < 4; ++i) {
    const cplx w = out[i].omega;
    const Mat2 q = w * w * Mat2::Identity() - w * p.M1 - p.M0;
    const double res = (q * out[i].mode).norm();
    if (!(res <= 1e-9)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "quadratic_eigensolve: residual %.3e at k=(%.6g, %.6g)", res,
                    p.k.kx, p.k.ky);
      throw NumericalError(buf);
    }
  }
  std::sort(out.begin(), out.end(), [](const Eigenpair& a, const Eigenpair& b) {
    if (a.omega.real() != b.omega.real()) return a.omega.real() < b.omega.real();
    return a.omega.imag() < b.omega.imag();
  });
  return out;
}

std::string to_string(TiltClass c) {
  switch (c) {
    case TiltClass::untilted: return "untilted";
    case TiltClass::under: return "under";
    case TiltClass::critical: return "critical";
    case TiltClass::over: return "over";
  }
  return "?";
}

TiltClass classify_slopes(double s1, double s2, double tol) {
  if (s1 * s2 < 0 && std::abs(s1 + s2) < tol) return TiltClass::untilted;
  const double lo = std::min(std::abs(s1), std::abs(s2));
  const double hi = std::max(std::abs(s1), std::abs(s2));
  if (lo < tol && hi >= tol) return TiltClass::critical;
  if (s1 * s2 > 0 && lo >= tol) return TiltClass::over;
  return TiltClass::under;
}

std::vector<SpectrumSample> band_path(const LatticeSpec& spec, Tilt V, const std::vector<Momentum>& path) {
  std::vector<SpectrumSample> out;
  out.reserve(path.size());
  const double h = 1e-5;
  const double vn = std::hypot(V.vx, V.vy);
  const double ux = vn > 0 ? V.vx / vn : 1.0;
  const double uy = vn > 0 ? V.vy / vn : 0.0;
  Vec2 ref0, ref1;
  for (std::size_t s = 0; s < path.size(); ++s) {
    const Momentum k = path[s];
    const auto eig = quadratic_eigensolve(bloch_matrices(spec, V, k));
    SpectrumSample smp;
    smp.k = k;
    for (int i = 0; i < 4; ++i) smp.omega[i] = eig[i].omega;
    std::array<Eigenpair, 2> pos{eig[2], eig[3]};
    smp.positive_branch = {2, 3};
    if (s > 0) {
      pos = follow(eig, ref0, ref1);
      if (pos[0].omega == eig[3].omega && pos[1].omega == eig[2].omega) smp.positive_branch = {3, 2};
    }
    ref0 = pos[0].mode;
    ref1 = pos[1].mode;

    auto slope = [&](double dx, double dy, int b) {
      const auto ep = follow(quadratic_eigensolve(bloch_matrices(spec, V, {k.kx + dx, k.ky + dy})), ref0, ref1);
      const auto em = follow(quadratic_eigensolve(bloch_matrices(spec, V, {k.kx - dx, k.ky - dy})), ref0, ref1);
      return (ep[b].omega.real() - em[b].omega.real()) / (2.0 * std::hypot(dx, dy));
    };
    for (int b = 0; b < 2; ++b) {
      smp.vgx[b] = slope(h, 0.0, b);
      smp.vgy[b] = spec.is_chain() ? 0.0 : slope(0.0, h, b);
    }
    smp.tilt_class = classify_slopes(ux * smp.vgx[0] + uy * smp.vgy[0], ux * smp.vgx[1] + uy * smp.vgy[1]);
    out.push_back(smp);
  }
  return out;
}

ConeParams cone_params(const LatticeSpec& spec, Tilt V, double dk) {
  if (!(dk > 0)) throw DomainError("cone_params: dk must be positive");
  const double vn = std::hypot(V.vx, spec.is_chain() ? 0.0 : V.vy);
  const double ux = vn > 0 ? V.vx / vn : 1.0;
  const double uy = vn > 0 && !spec.is_chain() ? V.vy / vn : 0.0;

  auto slopes = [&](double ex, double ey) {
    const auto ep = quadratic_eigensolve(bloch_matrices(spec, V, {dk * ex, dk * ey}));
    const auto em = quadratic_eigensolve(bloch_matrices(spec, V, {-dk * ex, -dk * ey}));
    const auto pair = follow(em, ep[2].mode, ep[3].mode);
    const double s0 = (ep[2].omega.real() - pair[0].omega.real()) / (2.0 * dk);
    const double s1 = (ep[3].omega.real() - pair[1].omega.real()) / (2.0 * dk);
    // one mode per branch must dominate; otherwise the pairing is a guess
    if (overlap(ep[2].mode, pair[0].mode) < 0.9 || overlap(ep[3].mode, pair[1].mode) < 0.9) {
      throw NumericalError("cone_params: branch tracking failed across the node");
    }
    return sorted2(s0, s1);
  };

  ConeParams c;
  c.slope_x = slopes(1.0, 0.0);
  c.slope_y = spec.is_chain() ? std::array<double, 2>{0.0, 0.0} : slopes(0.0, 1.0);
  c.slope_along = slopes(ux, uy);
  c.tilt_class = classify_slopes(c.slope_along[0], c.slope_along[1]);
  c.omega_node = crossing_frequency(spec, V);
  return c;
}

double crossing_frequency(const LatticeSpec& spec, Tilt V) {
  auto gap = [&](double k) {
    const auto e = quadratic_eigensolve(bloch_matrices(spec, V, {k, 0.0}));
    return std::abs(e[3].omega - e[2].omega);
  };
  const int n = 2000;
  const double half = 0.5 / spec.a;
  double best_k = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double k = -half + 2.0 * half * i / n;
    const double g = gap(k);
    if (g < best) {
      best = g;
      best_k = k;
    }
  }
  // golden-section refinement around the grid minimum
  double lo = best_k - 2.0 * half / n;
  double hi = best_k + 2.0 * half / n;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80 && best > 0; ++it) {
    const double a = hi - r * (hi - lo);
    const double b = lo + r * (hi - lo);
    if (gap(a) < gap(b)) hi = b; else lo = a;
    const double m = 0.5 * (lo + hi);
    const double g = gap(m);
    if (g < best) {
      best = g;
      best_k = m;
    }
  }
  if (best > 1e-6) throw NumericalError("crossing_frequency: positive branches do not touch in the scan window");
  const auto e = quadratic_eigensolve(bloch_matrices(spec, V, {best_k, 0.0}));
  return 0.5 * (e[2].omega.real() + e[3].omega.real());
}

void write_band_csv(std::ostream& os, const std::vector<SpectrumSample>& samples) {
  os << "k_x,k_y,ReOmega_1,ReOmega_2,ReOmega_3,ReOmega_4,ImOmega_1,ImOmega_2,ImOmega_3,ImOmega_4,class\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", s.k.kx, s.k.ky);
    os << buf;
    for (int i = 0; i < 4; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.omega[i].real());
      os << buf;
    }
    for (int i = 0; i < 4; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.omega[i].imag());
      os << buf;
    }
    os << ',' << to_string(s.tilt_class) << '\n';
  }
}

}  // namespace horizon

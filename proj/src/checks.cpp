#include "horizon/checks.hpp"

#include "horizon/lattice.hpp"
#include "horizon/oracles.hpp"
#include "horizon/quantum.hpp"
#include "horizon/spectra.hpp"

#include <cmath>

namespace horizon {

std::vector<Check> run_checks(const ValidateConfig& cfg) {
  cfg.validate();
  std::vector<Check> out;
  auto add = [&](std::string name, double value, std::string threshold, bool pass) {
    out.push_back({std::move(name), value, std::move(threshold), pass});
  };

  const OracleReport o = bloch_oracle(cfg.grid, {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, cfg.k_points);
  add("bloch_classical_rel_error", o.classical_rel_error, "< 1e-10", o.classical_rel_error < 1e-10);
  add("bloch_quantum_rel_error", o.quantum_rel_error, "< 1e-12", o.quantum_rel_error < 1e-12);

  LatticeSpec grid = LatticeSpec::grid(4, 4);
  const StabilityReport s8 = stability_scan(grid, {0.0, 0.0}, cfg.scan_resolution);
  add("stability_beta8_max_imag", s8.max_imag, "< 1e-9", s8.max_imag < 1e-9);
  add("stability_beta8_min_eig_m0", s8.min_eig_m0, ">= -1e-12", s8.min_eig_m0 >= -1e-12);
  grid.beta = -6.0 * grid.t_z;
  const StabilityReport s6 = stability_scan(grid, {0.0, 0.0}, cfg.scan_resolution);
  add("stability_beta6_min_eig_m0", s6.min_eig_m0, "< 0", s6.min_eig_m0 < 0);

  const LatticeSpec cone_spec = LatticeSpec::grid(4, 4);
  struct Regime {
    const char* name;
    double vx;
    double lo, hi;
    TiltClass cls;
  };
  for (const Regime& r : {Regime{"cone_untilted", 0.0, -0.5, 0.5, TiltClass::untilted},
                          Regime{"cone_critical", 1.0, 0.0, 1.0, TiltClass::critical},
                          Regime{"cone_over", 1.5, 0.25, 1.25, TiltClass::over}}) {
    const ConeParams c = cone_params(cone_spec, {r.vx, 0.0});
    const double err = std::max(std::abs(c.slope_along[0] - r.lo), std::abs(c.slope_along[1] - r.hi));
    add(std::string(r.name) + "_slope_error", err, "< 1e-3 and class " + to_string(r.cls),
        err < 1e-3 && c.tilt_class == r.cls);
  }

  const Rates r0 = rates(0.0, 0.1);
  add("rates_at_zero", std::max(std::abs(r0.gamma_h - 1.0), std::abs(r0.gamma_s - 0.5)), "== 0",
      r0.gamma_h == 1.0 && r0.gamma_s == 0.5);
  const Rates r1 = rates(0.05, 0.1);
  const double e_pi = std::abs(r1.gamma_h - std::exp(-pi)) / std::exp(-pi);
  add("rates_e_minus_pi_rel_error", e_pi, "< 1e-15", e_pi < 1e-15);
  const double slope = (std::log(rates(0.08, 0.1).gamma_h) - std::log(rates(0.02, 0.1).gamma_h)) / 0.06;
  const double slope_err = std::abs(slope + 2.0 * pi / 0.1) / (2.0 * pi / 0.1);
  add("rates_log_slope_rel_error", slope_err, "< 1e-12", slope_err < 1e-12);
  bool ordered = true;
  for (int i = 1; i <= 100; ++i) {
    const Rates r = rates(0.001 * i, 0.1);
    ordered = ordered && r.gamma_s < r.gamma_h;
  }
  add("rates_gamma_s_below_gamma_h", ordered ? 1.0 : 0.0, "for all sampled omega > 0", ordered);

  LatticeSpec fspec = LatticeSpec::grid(24, 24);
  const PotentialField f = funnel(fspec, 4.0, 11.5, 12.5);
  const double asym = build_lattice(fspec, f).velocity_asymmetry();
  add("funnel_velocity_gain_asymmetry", asym, "< 1e-14", asym < 1e-14);
  const double herm = build_hamiltonian(fspec, f.negated()).hermiticity_residual();
  add("funnel_hamiltonian_hermiticity", herm, "< 1e-14", herm < 1e-14);
  return out;
}

}  // namespace horizon

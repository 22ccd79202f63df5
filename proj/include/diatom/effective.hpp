#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "diatom/electronic_model.hpp"
#include "diatom/errors.hpp"
#include "diatom/fields.hpp"
#include "diatom/perturbation.hpp"
#include "diatom/radial.hpp"
#include "diatom/rotor.hpp"
#include "diatom/wavepacket.hpp"

// Effective nuclear Hamiltonians of the ground-state surface in the weak
// field regime, in three reduced modes:
//   rotor: R frozen at R_fix, H = B L^2 + c1(t) cos + c2(t) cos^2 + off(t)
//   rovib: radial kinetic + E_g(R) + L^2/(2 mu R^2) + the same angular
//          couplings with R-dependent coefficients
//   com:   1-D center-of-mass motion in the optical trap (see propagate.hpp)
// dc limit: coefficients follow the instantaneous field strength,
//   c1 = -E(t) (kappa R + d_gg), c2 = -1/2 E^2 (a_par - a_perp),
//   isotropic offset -1/2 E^2 a_perp.
// ac limit: c1 = 0 and the field enters only through its envelope,
//   c2 = -1/4 A(t)^2 (a_par - a_perp), offset -1/4 A^2 a_perp.

namespace diatom {

enum class Limit { dc, ac };

inline const char* to_string(Limit l) { return l == Limit::dc ? "dc" : "ac"; }

struct BuildOptions {
  RotorBasis basis{40, 0};
  std::optional<double> R_fix;        // rotor; defaults to the Morse R_e
  std::optional<RadialGrid> radial;   // rovib
};

struct EffectiveHamiltonian {
  Mode mode = Mode::rotor;
  Limit limit = Limit::dc;
  FieldSpec field;
  RotorBasis basis;
  Eigen::MatrixXd cos_m;   // cos theta coupling over the basis
  Eigen::MatrixXd cos2_m;  // cos^2 theta coupling
  Eigen::VectorXd l2;      // j(j+1)

  // rotor
  double B = 0.0;      // 1/(2 mu R_fix^2)
  double R_fix = 0.0;
  double dperm = 0.0;  // kappa R + d_z^gg at R_fix
  double a_par = 0.0, a_perp = 0.0;

  // rovib
  RadialGrid radial;
  double mu = 0.0;
  Eigen::VectorXd V_R;       // E_g^0(R) on the grid
  Eigen::VectorXd rot_R;     // 1/(2 mu R^2) on the grid
  Eigen::VectorXd dperm_R;   // kappa R + d_gg(R)
  Eigen::VectorXd a_par_R, a_perp_R;

  // Scalar angular coefficients at time t (rotor mode, or the common time
  // factors of rovib mode where they multiply the R-dependent vectors).
  struct Coefficients {
    double field = 0.0;  // instantaneous E (dc) or envelope amplitude (ac)
    double c1 = 0.0;     // cos theta coefficient (dc only)
    double c2 = 0.0;     // cos^2 theta coefficient
    double offset = 0.0; // isotropic scalar
  };

  Coefficients coefficients_at(double t) const {
    const FieldSample s = field_at(field, 0.0, t);
    Coefficients co;
    if (limit == Limit::dc) {
      co.field = s.instantaneous;
      co.c1 = -co.field * dperm;
      co.c2 = -0.5 * co.field * co.field * (a_par - a_perp);
      co.offset = -0.5 * co.field * co.field * a_perp;
    } else {
      co.field = s.amplitude;
      co.c1 = 0.0;
      co.c2 = -0.25 * co.field * co.field * (a_par - a_perp);
      co.offset = -0.25 * co.field * co.field * a_perp;
    }
    return co;
  }

  // Dense rotor Hamiltonian matrix at time t.
  Eigen::MatrixXd rotor_matrix(double t) const {
    if (mode != Mode::rotor)
      throw DomainError("rotor_matrix is defined for rotor mode only");
    const Coefficients co = coefficients_at(t);
    Eigen::MatrixXd H = co.c1 * cos_m + co.c2 * cos2_m;
    H += (B * l2.array() + co.offset).matrix().asDiagonal();
    return H;
  }

  // j-block of the rovib Hamiltonian at radial point index i and time t
  // (everything except the radial kinetic operator).
  Eigen::MatrixXd rovib_block(int i, double t) const {
    if (mode != Mode::rovib)
      throw DomainError("rovib_block is defined for rovib mode only");
    const FieldSample s = field_at(field, 0.0, t);
    const double E = limit == Limit::dc ? s.instantaneous : s.amplitude;
    const double pref = limit == Limit::dc ? 0.5 : 0.25;
    const double c1 = limit == Limit::dc ? -E * dperm_R[i] : 0.0;
    const double c2 = -pref * E * E * (a_par_R[i] - a_perp_R[i]);
    const double off = V_R[i] - pref * E * E * a_perp_R[i];
    Eigen::MatrixXd H = c1 * cos_m + c2 * cos2_m;
    H += (rot_R[i] * l2.array() + off).matrix().asDiagonal();
    return H;
  }
};

inline EffectiveHamiltonian build_effective(const ElectronicModel& model,
                                            const PolarizabilityCurve& alpha,
                                            const FieldSpec& field, Mode mode,
                                            Limit limit,
                                            const BuildOptions& opts = {}) {
  field.validate();
  if (alpha.gauge == Gauge::momentum)
    throw ConfigError("effective Hamiltonians take length-gauge polarizabilities; "
                      "momentum-gauge curves are truncation-unreliable");
  if (limit == Limit::ac) {
    if (field.kind != FieldKind::ac)
      throw ConfigError("ac limit requires an ac field");
    if (std::abs(alpha.omega - field.omega) > 1e-12)
      throw ConfigError("polarizability curve frequency " + num_str(alpha.omega) +
                        " does not match the field omega " + num_str(field.omega));
  } else {
    if (alpha.omega != 0.0)
      throw ConfigError("dc limit takes the static polarizability curve");
  }
  if (mode == Mode::com)
    throw ConfigError("com trap dynamics is built by com_trap_dynamics");

  EffectiveHamiltonian H;
  H.mode = mode;
  H.limit = limit;
  H.field = field;
  H.basis = opts.basis;
  H.cos_m = cos_theta_matrix(opts.basis);
  H.cos2_m = cos2_theta_matrix(opts.basis);
  H.l2 = l2_diagonal(opts.basis);

  const int g = model.ground_index();
  const double mu = model.nuclear().reduced_mass();

  if (mode == Mode::rotor) {
    const std::optional<double> R0 =
        opts.R_fix ? opts.R_fix : model.equilibrium_radius();
    if (!R0)
      throw ConfigError("rotor mode needs R_fix: the model has no Morse ground "
                        "curve to take an equilibrium radius from");
    H.R_fix = *R0;
    H.B = 1.0 / (2.0 * mu * H.R_fix * H.R_fix);
    H.dperm = model.nuclear_dipole_z(H.R_fix) +
              model.transition_dipole(g, g, H.R_fix).z();
    const AlphaPair a = alpha.at(H.R_fix);
    H.a_par = a.par;
    H.a_perp = a.perp;
    return H;
  }

  // rovib
  if (!opts.radial) throw ConfigError("rovib mode needs a radial grid");
  H.radial = *opts.radial;
  H.mu = mu;
  const Eigen::VectorXd R = H.radial.points();
  const int n = H.radial.n;
  H.V_R.resize(n);
  H.rot_R.resize(n);
  H.dperm_R.resize(n);
  H.a_par_R.resize(n);
  H.a_perp_R.resize(n);
  for (int i = 0; i < n; ++i) {
    H.V_R[i] = model.potential(g, R[i]);
    H.rot_R[i] = 1.0 / (2.0 * mu * R[i] * R[i]);
    H.dperm_R[i] = model.nuclear_dipole_z(R[i]) +
                   model.transition_dipole(g, g, R[i]).z();
    const AlphaPair a = alpha.at(R[i]);
    H.a_par_R[i] = a.par;
    H.a_perp_R[i] = a.perp;
  }
  return H;
}

} // namespace diatom

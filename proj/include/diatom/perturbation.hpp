#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "diatom/electronic_model.hpp"
#include "diatom/errors.hpp"

// Sum-over-states perturbation theory on the truncated electronic basis:
// static and dynamic polarizabilities in the length and momentum gauges,
// first/second-order field-dressed surface corrections, and the
// gauge-truncation diagnostic.
//
// Sign conventions follow omega_{nn'} = (E_n - E_{n'})/hbar throughout.
// The perpendicular component is the body-fixed xx element: for a field
// along space-fixed z only (-sin theta, 0, cos theta) of the body frame
// couples, so the y column never enters. Physically complete models have
// alpha_xx == alpha_yy; the single-Pi fixture represents the in-plane
// partner of the degenerate pair.

namespace diatom {

enum class Gauge { length, momentum };

inline const char* to_string(Gauge g) {
  return g == Gauge::length ? "length" : "momentum";
}

struct AlphaPair {
  double par = 0.0;   // alpha_parallel (zz), bohr^3
  double perp = 0.0;  // alpha_perpendicular (xx), bohr^3
};

inline constexpr double default_resonance_tol = 1e-9;  // Hartree
inline constexpr double degeneracy_tol = 1e-12;        // Hartree

namespace detail {

inline void require_sigma_ground(const ElectronicModel& model, int g) {
  if (model.state(g).symmetry != Symmetry::Sigma)
    throw ModelError("perturbation formulas assume a Sigma reference state; state " +
                     std::to_string(g) + " is " + to_string(model.state(g).symmetry));
  if (model.num_states() < 2)
    throw ModelError("sum-over-states needs a model truncation of >= 2 states");
}

} // namespace detail

// Static polarizability of state g at geometry R (Hartree denominators,
// e*bohr dipoles -> bohr^3). alpha_par sums z dipole components,
// alpha_perp the x components.
inline AlphaPair static_polarizability(const ElectronicModel& model, int g, double R) {
  detail::require_sigma_ground(model, g);
  const double Eg = model.potential(g, R);
  AlphaPair a;
  for (int np = 0; np < model.num_states(); ++np) {
    if (np == g) continue;
    const double dE = model.potential(np, R) - Eg;
    if (std::abs(dE) < degeneracy_tol)
      throw DegeneracyError("degenerate denominator between states " +
                            std::to_string(g) + " and " + std::to_string(np) +
                            " at R=" + num_str(R));
    const Eigen::Vector3d d = model.transition_dipole(g, np, R);
    a.par += 2.0 * d.z() * d.z() / dE;
    a.perp += 2.0 * d.x() * d.x() / dE;
  }
  return a;
}

// Dynamic polarizability at drive frequency omega_L. Length gauge:
//   alpha = 2 sum |d|^2 omega_{gn'} / (omega_L^2 - omega_{gn'}^2) ;
// momentum gauge carries the extra factor (omega_{gn'}/omega_L)^2 and is
// reliable only with a complete basis.
inline AlphaPair dynamic_polarizability(const ElectronicModel& model, int g, double R,
                                        double omega_L, Gauge gauge,
                                        double resonance_tol = default_resonance_tol) {
  detail::require_sigma_ground(model, g);
  if (omega_L < 0.0) throw DomainError("omega_L must be >= 0");
  if (gauge == Gauge::momentum && omega_L == 0.0)
    throw DomainError("momentum-gauge polarizability diverges at omega_L = 0 "
                      "(extra factor (omega_nn'/omega_L)^2)");
  const double Eg = model.potential(g, R);
  AlphaPair a;
  for (int np = 0; np < model.num_states(); ++np) {
    if (np == g) continue;
    const double w_gn = Eg - model.potential(np, R);  // omega_{gn'}
    if (std::abs(w_gn) < degeneracy_tol)
      throw DegeneracyError("degenerate denominator between states " +
                            std::to_string(g) + " and " + std::to_string(np) +
                            " at R=" + num_str(R));
    const Eigen::Vector3d d = model.transition_dipole(g, np, R);
    const bool coupled = d.squaredNorm() > 0.0;
    if (coupled && std::abs(omega_L - std::abs(w_gn)) < resonance_tol)
      throw ResonanceError("resonance: omega_L=" + num_str(omega_L) +
                           " within " + num_str(resonance_tol) +
                           " of transition " + std::to_string(g) + "->" +
                           std::to_string(np) + " (|omega_gn'|=" +
                           num_str(std::abs(w_gn)) + ")");
    if (!coupled) continue;
    double f = 2.0 * w_gn / (omega_L * omega_L - w_gn * w_gn);
    if (gauge == Gauge::momentum) f *= (w_gn / omega_L) * (w_gn / omega_L);
    a.par += f * d.z() * d.z();
    a.perp += f * d.x() * d.x();
  }
  return a;
}

// --------------------------------------------------------------------------
// Field-dressed surface corrections (perturbative)

struct SurfaceCorrection {
  double order1 = 0.0;  // Hartree
  double order2 = 0.0;
  double total = 0.0;
  double cos2_coeff = 0.0;  // coefficient of cos^2 theta
  double sin2_coeff = 0.0;  // coefficient of sin^2 theta
  double cos_coeff = 0.0;   // coefficient of cos theta
};

// E_g^(1) = -E_dc cos(theta) (kappa R + d_z^gg),
// E_g^(2) = -1/2 E_dc^2 (alpha_par cos^2 + alpha_perp sin^2).
inline SurfaceCorrection dc_surface_correction(const ElectronicModel& model, int g,
                                               double R, double theta, double E_dc) {
  if (!std::isfinite(E_dc)) throw DomainError("E_dc must be finite");
  const AlphaPair a = static_polarizability(model, g, R);
  const double dperm = model.nuclear_dipole_z(R) + model.transition_dipole(g, g, R).z();
  const double ct = std::cos(theta), st = std::sin(theta);
  SurfaceCorrection s;
  s.cos_coeff = -E_dc * dperm;
  s.cos2_coeff = -0.5 * E_dc * E_dc * a.par;
  s.sin2_coeff = -0.5 * E_dc * E_dc * a.perp;
  s.order1 = s.cos_coeff * ct;
  s.order2 = s.cos2_coeff * ct * ct + s.sin2_coeff * st * st;
  s.total = s.order1 + s.order2;
  return s;
}

// ac limit: the first-order term vanishes by time averaging; the second
// order carries 1/4 in place of the dc 1/2 and the dynamic alpha.
inline SurfaceCorrection ac_surface_correction(const ElectronicModel& model, int g,
                                               double R, double theta, double E_amp,
                                               double omega_L,
                                               double resonance_tol = default_resonance_tol) {
  if (!std::isfinite(E_amp)) throw DomainError("E_amp must be finite");
  if (!(omega_L > 0.0)) throw DomainError("ac correction requires omega_L > 0");
  const AlphaPair a =
      dynamic_polarizability(model, g, R, omega_L, Gauge::length, resonance_tol);
  const double ct = std::cos(theta), st = std::sin(theta);
  SurfaceCorrection s;
  s.cos_coeff = 0.0;
  s.cos2_coeff = -0.25 * E_amp * E_amp * a.par;
  s.sin2_coeff = -0.25 * E_amp * E_amp * a.perp;
  s.order1 = 0.0;
  s.order2 = s.cos2_coeff * ct * ct + s.sin2_coeff * st * st;
  s.total = s.order2;
  return s;
}

// --------------------------------------------------------------------------
// Gauge-truncation diagnostic
//
// Termwise, momentum - length = -(2/omega_L^2) |d_gn'|^2 omega_{gn'}
// exactly; summed over a complete basis the right side telescopes into
// (2/omega_L^2) * TRK with TRK = sum |d_gn'|^2 omega_{n'g}. On a truncated
// basis the two gauges genuinely differ, which is the point of the report.

struct GaugeTerm {
  int state = 0;            // n'
  double omega_gn = 0.0;    // (E_g - E_n')/hbar
  double dipole_sq = 0.0;   // |d_gn'|^2 (full vector norm)
  double length_term = 0.0;
  double momentum_term = 0.0;
  double difference = 0.0;   // momentum - length
  double closed_form = 0.0;  // -(2/omega_L^2) |d|^2 omega_gn'
};

struct GaugeReport {
  int ground = 0;
  double R = 0.0;
  double omega = 0.0;
  int n_max = 0;
  std::vector<GaugeTerm> terms;
  double summed_difference = 0.0;
  double trk_sum = 0.0;                  // sum |d_gn'|^2 omega_{n'g}
  double ponderomotive_constant = 0.0;   // (2/omega_L^2) * trk_sum
};

inline GaugeReport gauge_discrepancy_report(const ElectronicModel& model, int g,
                                            double R, double omega_L, int n_max,
                                            double resonance_tol = default_resonance_tol) {
  detail::require_sigma_ground(model, g);
  if (!(omega_L > 0.0)) throw DomainError("gauge report requires omega_L > 0");
  if (n_max < 0 || n_max >= model.num_states())
    throw DomainError("n_max must name a state index below the model truncation");

  GaugeReport rep;
  rep.ground = g;
  rep.R = R;
  rep.omega = omega_L;
  rep.n_max = n_max;

  const double Eg = model.potential(g, R);
  for (int np = 0; np <= n_max; ++np) {
    if (np == g) continue;
    const double w_gn = Eg - model.potential(np, R);
    if (std::abs(w_gn) < degeneracy_tol)
      throw DegeneracyError("degenerate denominator between states " +
                            std::to_string(g) + " and " + std::to_string(np));
    const double d2 = model.transition_dipole(g, np, R).squaredNorm();
    if (d2 > 0.0 && std::abs(omega_L - std::abs(w_gn)) < resonance_tol)
      throw ResonanceError("resonance: omega_L=" + num_str(omega_L) +
                           " hits transition " + std::to_string(g) + "->" +
                           std::to_string(np));
    GaugeTerm term;
    term.state = np;
    term.omega_gn = w_gn;
    term.dipole_sq = d2;
    term.length_term = 2.0 * d2 * w_gn / (omega_L * omega_L - w_gn * w_gn);
    term.momentum_term = term.length_term * (w_gn / omega_L) * (w_gn / omega_L);
    term.difference = term.momentum_term - term.length_term;
    term.closed_form = -(2.0 / (omega_L * omega_L)) * d2 * w_gn;
    rep.terms.push_back(term);
    rep.summed_difference += term.difference;
    rep.trk_sum += d2 * (-w_gn);  // omega_{n'g} = -omega_{gn'}
  }
  rep.ponderomotive_constant = (2.0 / (omega_L * omega_L)) * rep.trk_sum;
  return rep;
}

// --------------------------------------------------------------------------
// Sampled polarizability curve

struct PolarizabilitySample {
  double R = 0.0;
  double par = 0.0;
  double perp = 0.0;
};

struct PolarizabilityCurve {
  int state = 0;
  Gauge gauge = Gauge::length;
  double omega = 0.0;  // 0 for static
  std::vector<PolarizabilitySample> samples;

  // alpha at a given R: exact sample match first, cubic interpolation
  // through the samples otherwise (needs >= 4 of them).
  AlphaPair at(double R) const {
    for (const auto& s : samples)
      if (s.R == R) return {s.par, s.perp};
    if (samples.size() < 4)
      throw ConfigError("polarizability curve has no sample at R=" +
                        num_str(R) + " and too few samples to interpolate");
    std::vector<double> x, yp, yq;
    x.reserve(samples.size());
    for (const auto& s : samples) {
      x.push_back(s.R);
      yp.push_back(s.par);
      yq.push_back(s.perp);
    }
    const CubicSpline sp(x, yp), sq(x, yq);
    return {sp(R), sq(R)};
  }
};

inline PolarizabilityCurve sample_polarizability(
    const ElectronicModel& model, int g, const std::vector<double>& Rs,
    double omega_L, Gauge gauge, double resonance_tol = default_resonance_tol) {
  PolarizabilityCurve curve;
  curve.state = g;
  curve.gauge = gauge;
  curve.omega = omega_L;
  curve.samples.reserve(Rs.size());
  for (const double R : Rs) {
    const AlphaPair a = omega_L == 0.0 && gauge == Gauge::length
                            ? static_polarizability(model, g, R)
                            : dynamic_polarizability(model, g, R, omega_L, gauge,
                                                     resonance_tol);
    curve.samples.push_back({R, a.par, a.perp});
  }
  return curve;
}

} // namespace diatom

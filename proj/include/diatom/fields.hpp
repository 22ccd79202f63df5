#pragma once

#include <cmath>
#include <variant>

#include <Eigen/Dense>

#include "diatom/errors.hpp"

// Body-fixed <-> space-fixed rotation, dc/ac field profiles with a
// switching envelope eta(t), and the dipole interaction energy. Fields are
// polarized along the space-fixed z-axis by convention; the real ac field
// is E(t) = E_amp * eta(t) * cos(omega_L t).

namespace diatom {

// M(theta, phi) = R_z(phi) R_y(theta); third column maps the body-fixed
// z-axis to (sin t cos p, sin t sin p, cos t). M M^T = I, det M = +1.
inline Eigen::Matrix3d rotation_matrix(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  Eigen::Matrix3d m;
  m << ct * cp, -sp, st * cp,
       ct * sp,  cp, st * sp,
       -st,     0.0, ct;
  return m;
}

// z-space-fixed projection of a body-fixed vector: [M(theta,phi) v]_z.
// Only the third row of M enters, (-sin theta, 0, cos theta), so the
// result is phi-independent.
inline double body_to_space_z(double theta, const Eigen::Vector3d& v_bf) {
  return -std::sin(theta) * v_bf.x() + std::cos(theta) * v_bf.z();
}

// Interaction energy W = -[M D_bf]_z E_z for a z-polarized field.
inline double interaction_energy(const Eigen::Matrix3d& M,
                                 const Eigen::Vector3d& D_bf, double E_z) {
  return -(M * D_bf).z() * E_z;
}

// --------------------------------------------------------------------------
// Switching envelopes, eta(t) in [0,1], continuous.

struct ConstantEnvelope {};

// eta(t) = exp(-sigma (t - t0)^2)
struct GaussianEnvelope {
  double sigma;
  double t0;
};

// 0 before t_on, linear to 1 at t_off, 1 after.
struct LinearRampEnvelope {
  double t_on;
  double t_off;
};

using Envelope = std::variant<ConstantEnvelope, GaussianEnvelope, LinearRampEnvelope>;

inline double envelope_value(const Envelope& env, double t) {
  if (std::holds_alternative<ConstantEnvelope>(env)) return 1.0;
  if (const auto* g = std::get_if<GaussianEnvelope>(&env)) {
    const double u = t - g->t0;
    return std::exp(-g->sigma * u * u);
  }
  const auto& r = std::get<LinearRampEnvelope>(env);
  if (t <= r.t_on) return 0.0;
  if (t >= r.t_off) return 1.0;
  return (t - r.t_on) / (r.t_off - r.t_on);
}

// --------------------------------------------------------------------------
// Spatial profiles in the center-of-mass coordinate (1-D along x).

struct UniformProfile {};

// amplitude scaling exp(-((X - X0)/w0)^2); w0 is the beam waist in bohr.
struct GaussianBeamProfile {
  double waist;
  double center;
};

using SpatialProfile = std::variant<UniformProfile, GaussianBeamProfile>;

inline double profile_value(const SpatialProfile& prof, double X) {
  if (std::holds_alternative<UniformProfile>(prof)) return 1.0;
  const auto& g = std::get<GaussianBeamProfile>(prof);
  const double u = (X - g.center) / g.waist;
  return std::exp(-u * u);
}

// --------------------------------------------------------------------------
// FieldSpec / FieldSample

enum class FieldKind { dc, ac };

struct FieldSpec {
  FieldKind kind = FieldKind::dc;
  double amplitude = 0.0;  // Hartree/(e*bohr)
  double omega = 0.0;      // laser frequency, Hartree (ac only, > 0)
  Envelope envelope = ConstantEnvelope{};
  SpatialProfile profile = UniformProfile{};

  void validate() const {
    if (kind == FieldKind::ac && !(omega > 0.0))
      throw DomainError("ac field requires omega > 0");
    if (!std::isfinite(amplitude))
      throw DomainError("field amplitude must be finite");
  }
};

struct FieldSample {
  // dc: instantaneous strength E_dc(X_c, eta(t)); ac: envelope amplitude.
  double amplitude = 0.0;
  // ac: amplitude * cos(omega_L t); dc: equal to amplitude.
  double instantaneous = 0.0;
};

inline FieldSample field_at(const FieldSpec& spec, double X_c, double t) {
  spec.validate();
  const double a =
      spec.amplitude * envelope_value(spec.envelope, t) * profile_value(spec.profile, X_c);
  if (spec.kind == FieldKind::dc) return {a, a};
  return {a, a * std::cos(spec.omega * t)};
}

} // namespace diatom

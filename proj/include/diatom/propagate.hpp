#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "diatom/effective.hpp"
#include "diatom/errors.hpp"
#include "diatom/wavepacket.hpp"

// Norm-preserving wavepacket propagation. Every step is unitary by
// construction: rotor and rovib angular blocks advance through exact
// eigendecomposition of the midpoint-sampled Hamiltonian, radial/CoM
// kinetic factors are diagonal in sine space (Strang splitting). Norm is
// monitored continuously against the 1e-9 per unit time contract.

namespace diatom {

struct PropagateOptions {
  double norm_tol_per_time = 1e-9;
  // callback after every sample_every steps (and at t0/t1)
  int sample_every = 1;
  std::function<void(const Wavepacket&)> observer;
  // error out when the top two j populations exceed this (basis saturation)
  bool check_basis_saturation = true;
  double saturation_tol = 1e-10;
};

namespace detail {

inline void check_norm(const Wavepacket& psi, double t0, double tol_per_time) {
  const double drift = std::abs(psi.norm() - 1.0);
  const double budget = tol_per_time * std::max(1.0, psi.time - t0);
  if (drift > budget)
    throw PropagationError("norm drift " + num_str(drift) + " at t=" +
                           num_str(psi.time) +
                           " exceeds tolerance; reduce dt");
}

inline void check_saturation(const Wavepacket& psi, double tol) {
  if (psi.mode == Mode::com || psi.basis.size() < 3) return;
  const Eigen::VectorXd pops = j_populations(psi);
  const int n = static_cast<int>(pops.size());
  const double top = pops[n - 1] + pops[n - 2];
  if (top > tol)
    throw ConvergenceError("rotor basis saturated: top-two j populations sum to " +
                           num_str(top) + " > " + num_str(tol) +
                           "; increase j_max");
}

// exp(-i H dt) psi for a real symmetric H, by eigendecomposition.
struct HermitianStepper {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  bool valid = false;
  double key1 = 0.0, key2 = 0.0;

  void refresh(const Eigen::MatrixXd& H, double k1, double k2) {
    if (valid && k1 == key1 && k2 == key2) return;
    es.compute(H);
    key1 = k1;
    key2 = k2;
    valid = true;
  }

  void apply(Eigen::Ref<Eigen::MatrixXcd> c, double dt) const {
    const std::complex<double> mi(0.0, -1.0);
    c = es.eigenvectors() *
        ((mi * dt * es.eigenvalues().array()).exp().matrix().asDiagonal() *
         (es.eigenvectors().transpose() * c).eval());
  }
};

} // namespace detail

// --------------------------------------------------------------------------
// propagate: evolves i d psi/dt = H(t) psi from t0 to t1 in steps of dt,
// with time-dependent coefficients sampled at step midpoints.

inline Wavepacket propagate(Wavepacket psi, const EffectiveHamiltonian& H, double t0,
                            double t1, double dt, const PropagateOptions& opts = {}) {
  if (!(dt > 0.0)) throw DomainError("propagation needs dt > 0");
  if (t1 < t0) throw DomainError("propagation needs t1 >= t0");
  if (psi.mode != H.mode)
    throw ConfigError("wavepacket mode does not match the Hamiltonian mode");
  if (std::abs(psi.norm() - 1.0) > 1e-9)
    throw DomainError("wavepacket must be normalized before propagation");

  psi.time = t0;
  const std::complex<double> mi(0.0, -1.0);

  if (H.mode == Mode::rotor) {
    if (psi.c.rows() != H.basis.size())
      throw ConfigError("wavepacket basis does not match the Hamiltonian basis");
    detail::HermitianStepper stepper;
    long step = 0;
    if (opts.observer) opts.observer(psi);
    while (psi.time < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
      const double h = std::min(dt, t1 - psi.time);
      const auto co = H.coefficients_at(psi.time + 0.5 * h);
      Eigen::MatrixXd Hm = co.c1 * H.cos_m + co.c2 * H.cos2_m;
      Hm += (H.B * H.l2.array()).matrix().asDiagonal();
      stepper.refresh(Hm, co.c1, co.c2);
      stepper.apply(psi.c, h);
      psi.c *= std::exp(mi * (co.offset * h));
      psi.time += h;
      ++step;
      detail::check_norm(psi, t0, opts.norm_tol_per_time);
      if (step % opts.sample_every == 0 || psi.time >= t1) {
        if (opts.check_basis_saturation)
          detail::check_saturation(psi, opts.saturation_tol);
        if (opts.observer) opts.observer(psi);
      }
    }
    return psi;
  }

  if (H.mode == Mode::rovib) {
    if (psi.c.rows() != H.radial.n || psi.c.cols() != H.basis.size())
      throw ConfigError("wavepacket array does not match the rovib grid x basis");
    const Eigen::MatrixXcd S = H.radial.sine_transform().cast<std::complex<double>>();
    const Eigen::VectorXd Tk = H.radial.kinetic_eigenvalues(H.mu);
    Eigen::VectorXcd kin_half =
        (mi * (0.5 * dt) * Tk.array()).exp().matrix();
    double last_dt = dt;

    std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> blocks(
        static_cast<std::size_t>(H.radial.n));
    double block_key = std::numeric_limits<double>::quiet_NaN();

    long step = 0;
    if (opts.observer) opts.observer(psi);
    while (psi.time < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
      const double h = std::min(dt, t1 - psi.time);
      if (h != last_dt) {
        kin_half = (mi * (0.5 * h) * Tk.array()).exp().matrix();
        last_dt = h;
      }
      const double tm = psi.time + 0.5 * h;
      // half kinetic
      psi.c = S * (kin_half.asDiagonal() * (S.transpose() * psi.c).eval());
      // full angular/potential step, one j-block per radial point; the
      // blocks depend on time only through the sampled field value
      const FieldSample fs = field_at(H.field, 0.0, tm);
      const double key = H.limit == Limit::dc ? fs.instantaneous : fs.amplitude;
      if (key != block_key) {
        for (int i = 0; i < H.radial.n; ++i)
          blocks[static_cast<std::size_t>(i)].compute(H.rovib_block(i, tm));
        block_key = key;
      }
      for (int i = 0; i < H.radial.n; ++i) {
        const auto& es = blocks[static_cast<std::size_t>(i)];
        psi.c.row(i) = (es.eigenvectors() *
                        ((mi * h * es.eigenvalues().array()).exp().matrix().asDiagonal() *
                         (es.eigenvectors().transpose() * psi.c.row(i).transpose()).eval()))
                           .transpose();
      }
      // half kinetic
      psi.c = S * (kin_half.asDiagonal() * (S.transpose() * psi.c).eval());
      psi.time += h;
      ++step;
      detail::check_norm(psi, t0, opts.norm_tol_per_time);
      if (step % opts.sample_every == 0 || psi.time >= t1) {
        if (opts.check_basis_saturation)
          detail::check_saturation(psi, opts.saturation_tol);
        if (opts.observer) opts.observer(psi);
      }
    }
    return psi;
  }

  throw ConfigError("com wavepackets are propagated by com_trap_dynamics");
}

// Instantaneous energy expectation <psi|H(t)|psi> (rotor and rovib modes).
inline double energy_expectation(const Wavepacket& psi, const EffectiveHamiltonian& H,
                                 double t) {
  if (H.mode == Mode::rotor) {
    const Eigen::MatrixXd Hm = H.rotor_matrix(t);
    return (psi.c.col(0).adjoint() * Hm * psi.c.col(0)).real()(0, 0);
  }
  if (H.mode == Mode::rovib) {
    double e = 0.0;
    const Eigen::MatrixXcd S = H.radial.sine_transform().cast<std::complex<double>>();
    const Eigen::VectorXd Tk = H.radial.kinetic_eigenvalues(H.mu);
    const Eigen::MatrixXcd in_sine = S.transpose() * psi.c;
    e += (Tk.asDiagonal() * in_sine).cwiseProduct(in_sine.conjugate()).sum().real();
    for (int i = 0; i < H.radial.n; ++i) {
      const Eigen::MatrixXd Hb = H.rovib_block(i, t);
      e += (psi.c.row(i).conjugate() * Hb * psi.c.row(i).transpose()).real()(0, 0);
    }
    return e;
  }
  throw ConfigError("use com_trap_dynamics trajectories for com energies");
}

// --------------------------------------------------------------------------
// Center-of-mass optical trap dynamics:
//   i d psi/dt = [ -(1/2M) d^2/dX^2 - 1/4 alpha_bar E_amp^2(X, eta(t)) ] psi

struct ComTrajectory {
  std::vector<double> t;
  std::vector<double> x_mean;
  std::vector<double> x2_mean;
  std::vector<double> norm;
  std::vector<std::string> warnings;
  Wavepacket final_state;
};

inline ComTrajectory com_trap_dynamics(const ElectronicModel& model, double alpha_bar,
                                       const FieldSpec& field, Wavepacket psi,
                                       double t0, double t1, double dt,
                                       int sample_every = 1,
                                       double norm_tol_per_time = 1e-9) {
  if (!(alpha_bar > 0.0))
    throw DomainError("com trap needs alpha_bar > 0 (red-detuned convention)");
  if (field.kind != FieldKind::ac)
    throw ConfigError("com trap dynamics is an ac-limit mode");
  if (!std::holds_alternative<GaussianBeamProfile>(field.profile))
    throw ConfigError("com trap needs a gaussian_beam spatial profile");
  if (psi.mode != Mode::com) throw ConfigError("com trap needs a com wavepacket");
  if (!(dt > 0.0)) throw DomainError("propagation needs dt > 0");
  field.validate();

  const double M = model.nuclear().total_mass();
  const SineGrid& grid = psi.grid;
  const Eigen::VectorXd X = grid.points();
  Eigen::VectorXd prof2(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double p = profile_value(field.profile, X[i]);
    prof2[i] = p * p;
  }

  const Eigen::MatrixXcd S = grid.sine_transform().cast<std::complex<double>>();
  const Eigen::VectorXd Tk = grid.kinetic_eigenvalues(M);
  const std::complex<double> mi(0.0, -1.0);
  const Eigen::VectorXcd kin_half = (mi * (0.5 * dt) * Tk.array()).exp().matrix();

  ComTrajectory traj;
  bool edge_warned = false;
  const auto record = [&](const Wavepacket& p) {
    traj.t.push_back(p.time);
    const Eigen::VectorXd dens = p.c.col(0).cwiseAbs2();
    traj.x_mean.push_back(dens.dot(X));
    traj.x2_mean.push_back(dens.dot(X.cwiseAbs2()));
    traj.norm.push_back(p.norm());
    const double edge = dens[0] + dens[grid.n - 1];
    if (!edge_warned && edge > 1e-6) {
      traj.warnings.push_back("wavepacket reached the grid edge at t=" +
                              num_str(p.time) + " (edge population " +
                              num_str(edge) + "); enlarge the X grid");
      edge_warned = true;
    }
  };

  psi.time = t0;
  record(psi);
  long step = 0;
  while (psi.time < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
    const double h = std::min(dt, t1 - psi.time);
    const double tm = psi.time + 0.5 * h;
    const double eta = envelope_value(field.envelope, tm);
    const double pref = -0.25 * alpha_bar * field.amplitude * field.amplitude * eta * eta;
    const Eigen::VectorXcd kh =
        h == dt ? kin_half
                : Eigen::VectorXcd((mi * (0.5 * h) * Tk.array()).exp().matrix());
    psi.c = S * (kh.asDiagonal() * (S.transpose() * psi.c).eval());
    psi.c.col(0).array() *= (mi * h * (pref * prof2.array())).exp();
    psi.c = S * (kh.asDiagonal() * (S.transpose() * psi.c).eval());
    psi.time += h;
    ++step;
    detail::check_norm(psi, t0, norm_tol_per_time);
    if (step % sample_every == 0 || psi.time >= t1) record(psi);
  }
  traj.final_state = std::move(psi);
  return traj;
}

} // namespace diatom

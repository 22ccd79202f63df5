#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "diatom/electronic_model.hpp"
#include "diatom/errors.hpp"
#include "diatom/fields.hpp"

// Exact (non-perturbative) dressed-state solvers on the truncated
// electronic basis: the dc adiabatic Stark eigenproblem, the ac Floquet
// quasienergy eigenproblem in the extended (Fourier x electronic) space,
// and an independent monodromy cross-check from one-period time evolution.
// Hermitian formulation only; ionizing resonances are out of scope.

namespace diatom {

namespace detail {

// Interaction matrix V_{nn'} = -[M(theta,phi) D^{nn'}]_z * E for a
// z-space-fixed field; D includes the nuclear kappa*R term on the diagonal.
inline Eigen::MatrixXd coupling_matrix(const ElectronicModel& model, double R,
                                       double theta, double E) {
  const int n = model.num_states();
  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = -body_to_space_z(theta, model.total_dipole(i, j, R)) * E;
      V(i, j) = v;
      V(j, i) = v;
    }
  return V;
}

} // namespace detail

// --------------------------------------------------------------------------
// dc adiabatic Stark states

struct DressedSpectrum {
  double R = 0.0, theta = 0.0, phi = 0.0;
  double E_z = 0.0;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, over field-free states
  std::vector<int> tracking;     // field-free index -> dressed column
};

inline DressedSpectrum dc_adiabatic_states(const ElectronicModel& model, double R,
                                           double theta, double phi, double E_z) {
  const int n = model.num_states();
  if (n < 2) throw ModelError("dc dressed states need a truncation of >= 2");
  Eigen::MatrixXd H = detail::coupling_matrix(model, R, theta, E_z);
  for (int i = 0; i < n; ++i) H(i, i) += model.potential(i, R);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  DressedSpectrum out;
  out.R = R;
  out.theta = theta;
  out.phi = phi;
  out.E_z = E_z;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  out.tracking.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double wbest = -1.0;
    for (int k = 0; k < n; ++k) {
      const double w = out.eigenvectors(i, k) * out.eigenvectors(i, k);
      if (w > wbest) {
        wbest = w;
        best = k;
      }
    }
    out.tracking[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

// --------------------------------------------------------------------------
// ac Floquet eigenproblem

// Block description of the extended matrix: Fourier blocks m = -M..M of
// size N_e; diagonal blocks diag(E_n^0) + m omega_L, adjacent blocks V/2
// from the cos(omega_L t) carrier.
struct FloquetMatrix {
  int n_states = 0;
  int fourier_cutoff = 0;  // M
  double omega = 0.0;
  Eigen::MatrixXd H;

  int block_offset(int m) const { return (m + fourier_cutoff) * n_states; }
};

inline FloquetMatrix floquet_matrix(const ElectronicModel& model, double R,
                                    double theta, double E_amp, double omega_L, int M) {
  if (M < 1) throw DomainError("Fourier cutoff M must be >= 1");
  if (!(omega_L > 0.0)) throw DomainError("Floquet matrix requires omega_L > 0");
  const int n = model.num_states();
  const int dim = n * (2 * M + 1);

  FloquetMatrix fm;
  fm.n_states = n;
  fm.fourier_cutoff = M;
  fm.omega = omega_L;
  fm.H = Eigen::MatrixXd::Zero(dim, dim);

  const Eigen::MatrixXd V = detail::coupling_matrix(model, R, theta, E_amp);
  for (int m = -M; m <= M; ++m) {
    const int b = fm.block_offset(m);
    for (int i = 0; i < n; ++i)
      fm.H(b + i, b + i) = model.potential(i, R) + m * omega_L;
    if (m < M) {
      const int b2 = fm.block_offset(m + 1);
      fm.H.block(b, b2, n, n) = 0.5 * V;
      fm.H.block(b2, b, n, n) = 0.5 * V;
    }
  }
  return fm;
}

struct FloquetResult {
  double omega = 0.0;
  int fourier_cutoff = 0;
  int n_states = 0;
  double R = 0.0, theta = 0.0, E_amp = 0.0;
  Eigen::VectorXd raw_eigenvalues;   // of the extended matrix, ascending
  Eigen::VectorXd quasienergies;     // folded to (E_ref - w/2, E_ref + w/2]
  double folding_center = 0.0;       // E_ref = E_g^0(R)
  Eigen::MatrixXd eigenvectors;      // columns; row (m+M)*N_e + n'
  std::vector<int> tracking;         // field-free n -> extended column
  int tracked_column = -1;           // dressed continuation of the ground state
  double tracked_quasienergy = 0.0;  // unfolded, near E_g^0(R)
  double tracked_weight = 0.0;       // |C_{0g}|^2 of that column
};

inline double fold_quasienergy(double eps, double center, double omega) {
  const double k = std::ceil((eps - center) / omega - 0.5);
  return eps - k * omega;
}

// Shortest distance between two quasienergies on the circle of size omega.
inline double quasienergy_distance(double a, double b, double omega) {
  double d = std::fmod(std::abs(a - b), omega);
  return std::min(d, omega - d);
}

inline FloquetResult quasienergies(const ElectronicModel& model, double R,
                                   double theta, double E_amp, double omega_L, int M,
                                   double tie_threshold = 0.01) {
  const FloquetMatrix fm = floquet_matrix(model, R, theta, E_amp, omega_L, M);
  const int n = fm.n_states;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fm.H);

  FloquetResult out;
  out.omega = omega_L;
  out.fourier_cutoff = M;
  out.n_states = n;
  out.R = R;
  out.theta = theta;
  out.E_amp = E_amp;
  out.raw_eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  out.folding_center = model.potential(model.ground_index(), R);
  out.quasienergies.resize(out.raw_eigenvalues.size());
  for (Eigen::Index k = 0; k < out.raw_eigenvalues.size(); ++k)
    out.quasienergies[k] =
        fold_quasienergy(out.raw_eigenvalues[k], out.folding_center, omega_L);

  // Track each field-free state by its m=0 weight; ambiguous ground-state
  // tracking (top-two weights within tie_threshold) signals an avoided
  // crossing and is reported instead of silently relabeled.
  const int row0 = fm.block_offset(0);
  out.tracking.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double w1 = -1.0, w2 = -1.0;
    for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) {
      const double w = out.eigenvectors(row0 + i, k) * out.eigenvectors(row0 + i, k);
      if (w > w1) {
        w2 = w1;
        w1 = w;
        best = static_cast<int>(k);
      } else if (w > w2) {
        w2 = w;
      }
    }
    out.tracking[static_cast<std::size_t>(i)] = best;
    if (i == model.ground_index()) {
      if (w1 - w2 < tie_threshold)
        throw TrackingError(
            "ambiguous Floquet tracking of state " + std::to_string(i) +
            ": top weights " + num_str(w1) + " and " + num_str(w2) +
            " within " + num_str(tie_threshold) +
            " (R=" + num_str(R) + ", E_amp=" + num_str(E_amp) + ")");
      out.tracked_column = best;
      out.tracked_weight = w1;
      out.tracked_quasienergy = out.raw_eigenvalues[best];
    }
  }
  return out;
}

// Doubles the Fourier cutoff until the tracked quasienergy is stable.
struct FloquetAutoResult {
  FloquetResult result;
  int M_used = 0;
};

inline FloquetAutoResult quasienergies_auto(const ElectronicModel& model, double R,
                                            double theta, double E_amp, double omega_L,
                                            int M_start = 8, double tol = 1e-11,
                                            int M_cap = 64) {
  FloquetResult prev = quasienergies(model, R, theta, E_amp, omega_L, M_start);
  int M = M_start;
  while (2 * M <= M_cap) {
    FloquetResult next = quasienergies(model, R, theta, E_amp, omega_L, 2 * M);
    M *= 2;
    const double change =
        std::abs(next.tracked_quasienergy - prev.tracked_quasienergy);
    prev = std::move(next);
    if (change < tol) return {std::move(prev), M};
  }
  throw ConvergenceError("Floquet quasienergy not converged at Fourier cutoff M=" +
                         std::to_string(M_cap));
}

// --------------------------------------------------------------------------
// Monodromy cross-check
//
// One-period evolution of the N_e-level system under
// H(t) = diag(E_n^0) + V cos(omega_L t), piecewise-constant midpoint
// stepping with per-step matrix exponentials. The eigenphases of U(T)
// give quasienergies mod omega_L independently of the extended matrix.
inline std::vector<double> monodromy_quasienergies(const ElectronicModel& model,
                                                   double R, double theta, double E_amp,
                                                   double omega_L, int steps) {
  if (steps < 1) throw DomainError("monodromy needs steps >= 1");
  if (!(omega_L > 0.0)) throw DomainError("monodromy requires omega_L > 0");
  const int n = model.num_states();
  const double T = 2.0 * M_PI / omega_L;
  const double dt = T / steps;

  Eigen::MatrixXd H0 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) H0(i, i) = model.potential(i, R);
  const Eigen::MatrixXd V = detail::coupling_matrix(model, R, theta, E_amp);

  using CMat = Eigen::MatrixXcd;
  const std::complex<double> minus_i(0.0, -1.0);
  CMat U = CMat::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (int k = 0; k < steps; ++k) {
    const double tm = (k + 0.5) * dt;
    es.compute(H0 + std::cos(omega_L * tm) * V);
    const CMat step = es.eigenvectors() *
                      (minus_i * dt * es.eigenvalues().array()).exp().matrix().asDiagonal() *
                      es.eigenvectors().transpose();
    U = step * U;
  }

  const double unitarity = (U.adjoint() * U - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (unitarity > 1e-8)
    throw PropagationError("monodromy propagator non-unitary (|U^H U - I| = " +
                           num_str(unitarity) + "); increase steps");

  const Eigen::ComplexEigenSolver<CMat> ces(U, /*computeEigenvectors=*/false);
  std::vector<double> eps;
  eps.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double e = -std::arg(ces.eigenvalues()[i]) / T;
    e = std::fmod(e, omega_L);
    if (e < 0.0) e += omega_L;
    eps.push_back(e);
  }
  std::sort(eps.begin(), eps.end());
  return eps;
}

} // namespace diatom

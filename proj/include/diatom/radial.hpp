#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "diatom/electronic_model.hpp"
#include "diatom/errors.hpp"

// Sine-basis (particle-in-a-box) discrete grid: N interior points of
// [x_min, x_max] with hard walls. The unitary sine transform diagonalizes
// the second derivative exactly on this grid, which gives a spectrally
// accurate kinetic operator for both diagonalization and split-operator
// propagation.

namespace diatom {

struct SineGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  int n = 0;

  SineGrid() = default;
  SineGrid(double lo, double hi, int points) : x_min(lo), x_max(hi), n(points) {
    if (!(x_max > x_min)) throw DomainError("grid needs x_max > x_min");
    if (n < 4) throw DomainError("grid needs at least 4 points");
  }

  double length() const { return x_max - x_min; }
  double spacing() const { return length() / (n + 1); }

  Eigen::VectorXd points() const {
    Eigen::VectorXd x(n);
    const double h = spacing();
    for (int i = 0; i < n; ++i) x[i] = x_min + (i + 1) * h;
    return x;
  }

  // Orthogonal DST-I matrix, S_ik = sqrt(2/(n+1)) sin((i+1)(k+1) pi/(n+1)).
  Eigen::MatrixXd sine_transform() const {
    Eigen::MatrixXd S(n, n);
    const double f = M_PI / (n + 1);
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) S(i, k) = norm * std::sin((i + 1) * (k + 1) * f);
    return S;
  }

  // Kinetic eigenvalues ((k+1) pi / L)^2 / (2 mass) in sine space.
  Eigen::VectorXd kinetic_eigenvalues(double mass) const {
    Eigen::VectorXd t(n);
    const double f = M_PI / length();
    for (int k = 0; k < n; ++k) {
      const double kk = (k + 1) * f;
      t[k] = kk * kk / (2.0 * mass);
    }
    return t;
  }

  Eigen::MatrixXd kinetic_matrix(double mass) const {
    const Eigen::MatrixXd S = sine_transform();
    return S * kinetic_eigenvalues(mass).asDiagonal() * S.transpose();
  }
};

// Radial grid for vibrational problems: R_min > 0, at least 32 points.
struct RadialGrid : SineGrid {
  RadialGrid() = default;
  RadialGrid(double R_min, double R_max, int points) : SineGrid(R_min, R_max, points) {
    if (!(R_min > 0.0)) throw DomainError("radial grid needs R_min > 0");
    if (points < 32) throw DomainError("radial grid needs N >= 32");
  }
};

// --------------------------------------------------------------------------
// Field-free vibrational eigenstates of the ground curve, j = 0.

struct VibrationalResult {
  Eigen::VectorXd energies;      // lowest n_levels, Hartree
  Eigen::MatrixXd wavefunctions; // columns, DVR coefficients (unit 2-norm)
  std::vector<std::string> warnings;
};

inline VibrationalResult vibrational_eigenstates(const ElectronicModel& model,
                                                 const RadialGrid& grid, int n_levels,
                                                 bool doubling_check = true) {
  if (n_levels < 1 || n_levels > grid.n)
    throw DomainError("n_levels must be in [1, N]");
  const double mu = model.nuclear().reduced_mass();
  const int g = model.ground_index();

  const auto solve = [&](const SineGrid& gr) {
    Eigen::MatrixXd H = gr.kinetic_matrix(mu);
    const Eigen::VectorXd R = gr.points();
    for (int i = 0; i < gr.n; ++i) H(i, i) += model.potential(g, R[i]);
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H);
  };

  const auto es = solve(grid);
  VibrationalResult out;
  out.energies = es.eigenvalues().head(n_levels);
  out.wavefunctions = es.eigenvectors().leftCols(n_levels);

  // Well-coverage check: the inner wall should rise far above the part of
  // the well the outer edge covers.
  {
    const Eigen::VectorXd R = grid.points();
    double vmin = model.potential(g, R[0]);
    for (int i = 1; i < grid.n; ++i) vmin = std::min(vmin, model.potential(g, R[i]));
    const double inner = model.potential(g, R[0]) - vmin;
    const double outer = model.potential(g, R[grid.n - 1]) - vmin;
    if (inner < 10.0 * outer)
      out.warnings.push_back("radial grid may not cover the well: inner wall rises " +
                             num_str(inner) + " Ha above the minimum vs outer " +
                             num_str(outer) + " Ha");
  }

  if (doubling_check) {
    // Halving h (same box: N -> 2N+1) must leave the levels unchanged.
    const SineGrid fine(grid.x_min, grid.x_max, 2 * grid.n + 1);
    const auto es2 = solve(fine);
    for (int v = 0; v < n_levels; ++v) {
      const double d = std::abs(es2.eigenvalues()[v] - out.energies[v]);
      if (d > 1e-8)
        out.warnings.push_back("level v=" + std::to_string(v) +
                               " unconverged: changes by " + num_str(d) +
                               " Ha under grid doubling");
    }
  }
  return out;
}

} // namespace diatom

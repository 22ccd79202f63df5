#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "diatom/errors.hpp"

// Rigid-rotor basis |j,m> with fixed m (axial symmetry of z-polarized
// fields conserves m) and the cos/cos^2 coupling matrices from standard
// spherical-harmonic recurrences.

namespace diatom {

struct RotorBasis {
  int j_max = 40;
  int m = 0;

  RotorBasis() = default;
  RotorBasis(int jmax, int m_val) : j_max(jmax), m(m_val) {
    if (j_max < std::abs(m))
      throw DomainError("rotor basis needs j_max >= |m| (j_max=" +
                        std::to_string(j_max) + ", m=" + std::to_string(m) + ")");
  }

  int size() const { return j_max - std::abs(m) + 1; }
  int j_of(int i) const { return std::abs(m) + i; }
};

namespace detail {

// <j,m|cos theta|j+1,m> = sqrt(((j+1)^2 - m^2) / ((2j+1)(2j+3)))
inline double cos_coupling(int j, int m) {
  const double num = double(j + 1) * (j + 1) - double(m) * m;
  return std::sqrt(num / ((2.0 * j + 1.0) * (2.0 * j + 3.0)));
}

} // namespace detail

// cos theta couples j <-> j+-1 at fixed m.
inline Eigen::MatrixXd cos_theta_matrix(const RotorBasis& basis) {
  const int n = basis.size();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double c = detail::cos_coupling(basis.j_of(i), basis.m);
    C(i, i + 1) = c;
    C(i + 1, i) = c;
  }
  return C;
}

// cos^2 theta couples j <-> j, j+-2 at fixed m. Diagonal from
// cos^2 = (1 + 2 P_2)/3 with <j,m|P_2|j,m> = (j(j+1)-3m^2)/((2j-1)(2j+3));
// the j,j+2 element is the product of the two intermediate cos couplings.
inline Eigen::MatrixXd cos2_theta_matrix(const RotorBasis& basis) {
  const int n = basis.size();
  const int m = basis.m;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = basis.j_of(i);
    C(i, i) = 1.0 / 3.0 +
              (2.0 / 3.0) * (double(j) * (j + 1) - 3.0 * m * m) /
                  ((2.0 * j - 1.0) * (2.0 * j + 3.0));
    if (i + 2 < n) {
      const double c = detail::cos_coupling(j, m) * detail::cos_coupling(j + 1, m);
      C(i, i + 2) = c;
      C(i + 2, i) = c;
    }
  }
  return C;
}

// diag j(j+1); multiplied by B (rotor) or 1/(2 mu R^2) (rovib).
inline Eigen::VectorXd l2_diagonal(const RotorBasis& basis) {
  Eigen::VectorXd d(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    const double j = basis.j_of(i);
    d[i] = j * (j + 1.0);
  }
  return d;
}

} // namespace diatom

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "diatom/errors.hpp"

namespace diatom {

// Natural cubic spline through (x_i, y_i). Knots must be strictly
// increasing and at least 4 (well-posed cubic interpolation). Evaluation
// outside [x_front, x_back] throws: tabulated data is never extrapolated.
class CubicSpline {
public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 4 || y_.size() != n)
      throw ModelError("cubic spline needs >= 4 knots and matching y values");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw ModelError("cubic spline knots must be strictly increasing");

    // Second derivatives from the natural boundary tridiagonal system,
    // solved by the standard forward sweep / back substitution.
    m_.assign(n, 0.0);
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
      const double p = sig * m_[i - 1] + 2.0;
      m_[i] = (sig - 1.0) / p;
      u[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) -
             (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
      u[i] = (6.0 * u[i] / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
    }
    for (std::size_t k = n - 1; k-- > 1;)
      m_[k] = m_[k] * m_[k + 1] + u[k];
    m_[0] = m_[n - 1] = 0.0;
  }

  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

  double operator()(double x) const {
    if (x < x_.front() || x > x_.back())
      throw DomainError("tabulated curve evaluated at R=" + num_str(x) +
                        " outside [" + num_str(x_.front()) + ", " +
                        num_str(x_.back()) + "] (no extrapolation)");
    // Binary search for the bracketing interval.
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (hi + lo) / 2;
      (x_[mid] > x ? hi : lo) = mid;
    }
    const double h = x_[hi] - x_[lo];
    const double a = (x_[hi] - x) / h;
    const double b = (x - x_[lo]) / h;
    return a * y_[lo] + b * y_[hi] +
           ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
  }

  double derivative(double x) const {
    if (x < x_.front() || x > x_.back())
      throw DomainError("tabulated curve derivative outside table range");
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (hi + lo) / 2;
      (x_[mid] > x ? hi : lo) = mid;
    }
    const double h = x_[hi] - x_[lo];
    const double a = (x_[hi] - x) / h;
    const double b = (x - x_[lo]) / h;
    return (y_[hi] - y_[lo]) / h +
           ((3.0 * b * b - 1.0) * m_[hi] - (3.0 * a * a - 1.0) * m_[lo]) * h / 6.0;
  }

private:
  std::vector<double> x_, y_, m_;
};

} // namespace diatom

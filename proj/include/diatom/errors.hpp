#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace diatom {

// short %g rendering for diagnostics; error text must not print 1e-9 as 0.000000
inline std::string num_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside its mathematical domain (R <= 0, omega = 0 in the
// momentum gauge, Fourier cutoff < 1, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// State or grid index out of range.
class IndexError : public Error {
public:
  using Error::Error;
};

// Invalid model definition (selection-rule violation, bad table grid,
// malformed JSON model file).
class ModelError : public Error {
public:
  using Error::Error;
};

// Sum-over-states denominator below the degeneracy threshold.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

// Drive frequency within resonance_tol of a dipole-coupled transition.
class ResonanceError : public Error {
public:
  using Error::Error;
};

// Adiabatic state tracking could not pick a unique dressed state.
class TrackingError : public Error {
public:
  using Error::Error;
};

// Norm drift or unitarity loss during wavepacket propagation.
class PropagationError : public Error {
public:
  using Error::Error;
};

// A truncation/self-convergence check failed (Fourier cutoff cap,
// rotor basis saturation, grid doubling).
class ConvergenceError : public Error {
public:
  using Error::Error;
};

// Scenario/config validation failure.
class ConfigError : public Error {
public:
  using Error::Error;
};

// File system failure while reading configs or writing outputs.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace diatom

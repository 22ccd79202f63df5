#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <fstream>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "diatom/errors.hpp"
#include "diatom/radial.hpp"
#include "diatom/rotor.hpp"

namespace diatom {

enum class Mode { rotor, rovib, com };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::rotor: return "rotor";
    case Mode::rovib: return "rovib";
    default: return "com";
  }
}

// Complex coefficient array over a rotor basis and/or a sine grid.
// Coefficients are DVR/basis amplitudes, so the norm is the plain 2-norm.
// rotor: column vector over j; rovib: (N_R x N_j); com: column over X.
struct Wavepacket {
  Mode mode = Mode::rotor;
  RotorBasis basis;   // rotor, rovib
  SineGrid grid;      // rovib (radial), com (X)
  Eigen::MatrixXcd c;
  double time = 0.0;

  double norm() const { return c.norm(); }

  void normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw DomainError("cannot normalize a zero wavepacket");
    c /= n;
  }

  static Wavepacket rotor_state(const RotorBasis& basis, int j) {
    if (j < std::abs(basis.m) || j > basis.j_max)
      throw DomainError("initial j outside the rotor basis");
    Wavepacket psi;
    psi.mode = Mode::rotor;
    psi.basis = basis;
    psi.c = Eigen::MatrixXcd::Zero(basis.size(), 1);
    psi.c(j - std::abs(basis.m), 0) = 1.0;
    return psi;
  }

  static Wavepacket rotor_coeffs(const RotorBasis& basis, Eigen::VectorXcd coeffs) {
    if (coeffs.size() != basis.size())
      throw DomainError("rotor coefficient count does not match the basis");
    Wavepacket psi;
    psi.mode = Mode::rotor;
    psi.basis = basis;
    psi.c = coeffs;
    psi.normalize();
    return psi;
  }

  static Wavepacket rovib(const RotorBasis& basis, const RadialGrid& grid,
                          Eigen::MatrixXcd coeffs) {
    if (coeffs.rows() != grid.n || coeffs.cols() != basis.size())
      throw DomainError("rovib coefficient array does not match grid x basis");
    Wavepacket psi;
    psi.mode = Mode::rovib;
    psi.basis = basis;
    psi.grid = grid;
    psi.c = std::move(coeffs);
    psi.normalize();
    return psi;
  }

  // Normalized Gaussian exp(-(x-x0)^2/(4 sigma2)) exp(i k x) on the grid;
  // sigma2 is the position variance <x^2>-<x>^2 of the minimal packet.
  static Wavepacket com_gaussian(const SineGrid& grid, double x0, double sigma2,
                                 double k = 0.0) {
    if (!(sigma2 > 0.0)) throw DomainError("Gaussian packet needs sigma2 > 0");
    Wavepacket psi;
    psi.mode = Mode::com;
    psi.grid = grid;
    psi.c.resize(grid.n, 1);
    const Eigen::VectorXd x = grid.points();
    for (int i = 0; i < grid.n; ++i) {
      const double u = x[i] - x0;
      psi.c(i, 0) = std::polar(std::exp(-u * u / (4.0 * sigma2)), k * x[i]);
    }
    psi.normalize();
    return psi;
  }
};

enum class Observable { cos_theta, cos2_theta, j_populations, norm };

inline double expectation(const Wavepacket& psi, Observable obs) {
  if (obs == Observable::norm) return psi.norm();
  if (psi.mode == Mode::com)
    throw DomainError("angular observables are undefined for a com wavepacket");
  const Eigen::MatrixXd O = obs == Observable::cos_theta
                                ? cos_theta_matrix(psi.basis)
                                : cos2_theta_matrix(psi.basis);
  if (psi.mode == Mode::rotor)
    return (psi.c.col(0).adjoint() * O * psi.c.col(0)).real()(0, 0);
  // rovib: coefficients are (R x j); the angular operator acts on columns.
  return (psi.c.conjugate().cwiseProduct(psi.c * O.transpose())).sum().real();
}

inline Eigen::VectorXd j_populations(const Wavepacket& psi) {
  if (psi.mode == Mode::com)
    throw DomainError("j populations are undefined for a com wavepacket");
  if (psi.mode == Mode::rotor) return psi.c.col(0).cwiseAbs2();
  return psi.c.cwiseAbs2().colwise().sum().transpose();
}

// --------------------------------------------------------------------------
// Checkpoints: one line of JSON header, '\n', then the raw coefficient
// array as little-endian 8-byte floats, interleaved (re, im), column-major.

inline void save_checkpoint(const Wavepacket& psi, const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint format is little-endian");
  nlohmann::json h;
  h["format"] = "diatom-wavepacket-1";
  h["mode"] = to_string(psi.mode);
  h["time"] = psi.time;
  h["rows"] = psi.c.rows();
  h["cols"] = psi.c.cols();
  h["norm"] = psi.norm();
  if (psi.mode != Mode::com) {
    h["j_max"] = psi.basis.j_max;
    h["m"] = psi.basis.m;
  }
  if (psi.mode != Mode::rotor) {
    h["grid"] = {{"min", psi.grid.x_min}, {"max", psi.grid.x_max}, {"n", psi.grid.n}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint file for writing: " + path);
  out << h.dump() << '\n';
  out.write(reinterpret_cast<const char*>(psi.c.data()),
            static_cast<std::streamsize>(sizeof(std::complex<double>) * psi.c.size()));
  if (!out) throw IoError("short write on checkpoint file: " + path);
}

inline Wavepacket load_checkpoint(const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint format is little-endian");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint file: " + path);
  std::string header;
  std::getline(in, header);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad checkpoint header in " + path + ": " + e.what());
  }
  if (h.value("format", "") != "diatom-wavepacket-1")
    throw IoError("unknown checkpoint format in " + path);

  Wavepacket psi;
  const std::string mode = h.at("mode").get<std::string>();
  psi.mode = mode == "rotor" ? Mode::rotor : mode == "rovib" ? Mode::rovib : Mode::com;
  psi.time = h.at("time").get<double>();
  if (psi.mode != Mode::com)
    psi.basis = RotorBasis(h.at("j_max").get<int>(), h.at("m").get<int>());
  if (psi.mode != Mode::rotor) {
    const auto& gj = h.at("grid");
    psi.grid = SineGrid(gj.at("min").get<double>(), gj.at("max").get<double>(),
                        gj.at("n").get<int>());
  }
  psi.c.resize(h.at("rows").get<Eigen::Index>(), h.at("cols").get<Eigen::Index>());
  in.read(reinterpret_cast<char*>(psi.c.data()),
          static_cast<std::streamsize>(sizeof(std::complex<double>) * psi.c.size()));
  if (!in) throw IoError("short read on checkpoint file: " + path);
  return psi;
}

} // namespace diatom

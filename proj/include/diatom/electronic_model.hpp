#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "diatom/errors.hpp"
#include "diatom/spline.hpp"

// Field-free electronic structure inputs: potential curves E_n^0(R),
// body-fixed dipole matrix elements, and the nuclear "permanent-like"
// dipole term kappa*R. Atomic units throughout (Hartree, bohr, e*bohr).

namespace diatom {

enum class Symmetry { Sigma, Pi };

inline const char* to_string(Symmetry s) {
  return s == Symmetry::Sigma ? "Sigma" : "Pi";
}

// --------------------------------------------------------------------------
// Potential curves

struct MorsePotential {
  double D_e;        // well depth, Hartree
  double a;          // range parameter, 1/bohr
  double R_e;        // equilibrium distance, bohr
  double asymptote;  // dissociation limit, Hartree

  double value(double R) const {
    const double u = 1.0 - std::exp(-a * (R - R_e));
    return asymptote + D_e * (u * u - 1.0);
  }
  double derivative(double R) const {
    const double e = std::exp(-a * (R - R_e));
    return 2.0 * D_e * a * e * (1.0 - e);
  }
};

struct ConstantPotential {
  double value;
};

class PotentialCurve {
public:
  PotentialCurve(MorsePotential m) : curve_(m) {}
  PotentialCurve(ConstantPotential c) : curve_(c) {}
  PotentialCurve(CubicSpline table) : curve_(std::move(table)) {}

  double value(double R) const {
    if (R <= 0.0)
      throw DomainError("potential requested at R <= 0");
    if (const auto* m = std::get_if<MorsePotential>(&curve_)) return m->value(R);
    if (const auto* c = std::get_if<ConstantPotential>(&curve_)) return c->value;
    return std::get<CubicSpline>(curve_)(R);
  }

  double derivative(double R) const {
    if (R <= 0.0)
      throw DomainError("potential derivative requested at R <= 0");
    if (const auto* m = std::get_if<MorsePotential>(&curve_)) return m->derivative(R);
    if (std::holds_alternative<ConstantPotential>(curve_)) return 0.0;
    return std::get<CubicSpline>(curve_).derivative(R);
  }

  const MorsePotential* as_morse() const {
    return std::get_if<MorsePotential>(&curve_);
  }

private:
  std::variant<MorsePotential, ConstantPotential, CubicSpline> curve_;
};

struct ElectronicState {
  int index = 0;
  Symmetry symmetry = Symmetry::Sigma;
  PotentialCurve potential;
};

// --------------------------------------------------------------------------
// Dipole matrix elements
//
// One function per unordered state pair; entries(n,n') == entries(n',n)
// holds exactly because the electronic wavefunctions are real.

struct ConstantDipole {
  Eigen::Vector3d d;
};

// d_z(R) = amplitude * exp(-(R - center)^2 / width)
struct GaussianZDipole {
  double amplitude;
  double center;
  double width;
};

struct TabulatedDipole {
  int axis;  // 0 = x, 1 = y, 2 = z
  CubicSpline table;
};

class DipoleFunction {
public:
  DipoleFunction(ConstantDipole c) : f_(c) {}
  DipoleFunction(GaussianZDipole g) : f_(g) {}
  DipoleFunction(TabulatedDipole t) : f_(std::move(t)) {}

  Eigen::Vector3d value(double R) const {
    if (const auto* c = std::get_if<ConstantDipole>(&f_)) return c->d;
    if (const auto* g = std::get_if<GaussianZDipole>(&f_)) {
      const double u = R - g->center;
      return {0.0, 0.0, g->amplitude * std::exp(-u * u / g->width)};
    }
    const auto& t = std::get<TabulatedDipole>(f_);
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    d[t.axis] = t.table(R);
    return d;
  }

  // Which components can ever be nonzero; used for selection-rule checks.
  std::array<bool, 3> support() const {
    if (const auto* c = std::get_if<ConstantDipole>(&f_))
      return {c->d.x() != 0.0, c->d.y() != 0.0, c->d.z() != 0.0};
    if (std::holds_alternative<GaussianZDipole>(f_)) return {false, false, true};
    const auto& t = std::get<TabulatedDipole>(f_);
    std::array<bool, 3> s{false, false, false};
    s[t.axis] = true;
    return s;
  }

private:
  std::variant<ConstantDipole, GaussianZDipole, TabulatedDipole> f_;
};

struct NuclearData {
  int Z_A = 1;
  int Z_B = 1;
  double m_A = 1.0;  // nuclear masses in electron-mass units
  double m_B = 1.0;

  double reduced_mass() const { return m_A * m_B / (m_A + m_B); }
  double total_mass() const { return m_A + m_B; }
  // kappa*R is the z-component of the nuclear "permanent-like" dipole;
  // vanishes exactly when Z_A m_B == Z_B m_A.
  double kappa() const { return (Z_A * m_B - Z_B * m_A) / (m_A + m_B); }
};

// --------------------------------------------------------------------------
// ElectronicModel
//
// Immutable after construction; every accessor is a pure function and safe
// for concurrent use. The infinite electronic basis of the formalism is
// truncated to the declared state list; convergence of sum-over-states
// quantities under this truncation is diagnosed elsewhere, never assumed.

class ElectronicModel {
public:
  ElectronicModel(std::string name, std::vector<ElectronicState> states,
                  std::map<std::pair<int, int>, DipoleFunction> dipoles,
                  NuclearData nuclear, int ground_index)
      : name_(std::move(name)),
        states_(std::move(states)),
        nuclear_(nuclear),
        ground_(ground_index) {
    const int n = static_cast<int>(states_.size());
    if (n < 1) throw ModelError("model needs at least one electronic state");
    if (ground_ < 0 || ground_ >= n)
      throw ModelError("ground_index out of range");
    if (states_[static_cast<std::size_t>(ground_)].symmetry != Symmetry::Sigma)
      throw ModelError("ground state must have Sigma symmetry");

    for (auto& [key, f] : dipoles) {
      auto [i, j] = key;
      if (i < 0 || i >= n || j < 0 || j >= n)
        throw ModelError("dipole entry references state out of range");
      check_selection_rules(i, j, f);
      dipoles_.emplace(std::minmax(i, j), std::move(f));
    }
  }

  const std::string& name() const { return name_; }
  int num_states() const { return static_cast<int>(states_.size()); }
  int ground_index() const { return ground_; }
  const NuclearData& nuclear() const { return nuclear_; }
  const ElectronicState& state(int n) const {
    check_index(n);
    return states_[static_cast<std::size_t>(n)];
  }

  // E_n^0(R) in Hartree.
  double potential(int n, double R) const {
    check_index(n);
    return states_[static_cast<std::size_t>(n)].potential.value(R);
  }

  double potential_derivative(int n, double R) const {
    check_index(n);
    return states_[static_cast<std::size_t>(n)].potential.derivative(R);
  }

  // Body-fixed electronic dipole matrix element <n| -e sum_j r_j |n'> (e*bohr).
  // Selection-rule zeros are exact: absent pairs return the zero vector.
  Eigen::Vector3d transition_dipole(int n, int np, double R) const {
    check_index(n);
    check_index(np);
    if (R <= 0.0) throw DomainError("transition dipole requested at R <= 0");
    const auto it = dipoles_.find(std::minmax(n, np));
    if (it == dipoles_.end()) return Eigen::Vector3d::Zero();
    return it->second.value(R);
  }

  // z-component of the nuclear dipole term, kappa * R.
  double nuclear_dipole_z(double R) const {
    if (R <= 0.0) throw DomainError("nuclear dipole requested at R <= 0");
    return nuclear_.kappa() * R;
  }

  // Full body-fixed dipole matrix element including the nuclear term on
  // the diagonal: D^{nn'}(R) = delta_{nn'} kappa R e_z + d^{nn'}(R).
  Eigen::Vector3d total_dipole(int n, int np, double R) const {
    Eigen::Vector3d d = transition_dipole(n, np, R);
    if (n == np) d.z() += nuclear_dipole_z(R);
    return d;
  }

  // Equilibrium radius of the ground curve when it is a Morse potential;
  // models built from constant or tabulated curves have no natural choice
  // and callers must supply one.
  std::optional<double> equilibrium_radius() const {
    if (const auto* m =
            states_[static_cast<std::size_t>(ground_)].potential.as_morse())
      return m->R_e;
    return std::nullopt;
  }

private:
  void check_index(int n) const {
    if (n < 0 || n >= num_states())
      throw IndexError("state index " + std::to_string(n) + " out of range [0, " +
                       std::to_string(num_states()) + ")");
  }

  void check_selection_rules(int i, int j, const DipoleFunction& f) const {
    const auto si = states_[static_cast<std::size_t>(i)].symmetry;
    const auto sj = states_[static_cast<std::size_t>(j)].symmetry;
    const auto sup = f.support();
    if (si == sj) {
      // Sigma-Sigma (and Pi-Pi): z only.
      if (sup[0] || sup[1])
        throw ModelError("dipole (" + std::to_string(i) + "," + std::to_string(j) +
                         "): x/y components forbidden between equal symmetries");
    } else {
      // Sigma-Pi: x/y only.
      if (sup[2])
        throw ModelError("dipole (" + std::to_string(i) + "," + std::to_string(j) +
                         "): z component forbidden between Sigma and Pi");
    }
  }

  std::string name_;
  std::vector<ElectronicState> states_;
  std::map<std::pair<int, int>, DipoleFunction> dipoles_;
  NuclearData nuclear_;
  int ground_;
};

// --------------------------------------------------------------------------
// Built-in models. All parameter values are test fixtures chosen so that
// each model isolates one verification axis; none are fitted to data.

namespace builtin {

// Two Sigma states with a constant gap and constant z transition dipole.
// Exactly solvable in a dc field (2x2 Stark problem).
inline ElectronicModel two_level() {
  std::vector<ElectronicState> states;
  states.push_back({0, Symmetry::Sigma, ConstantPotential{0.0}});
  states.push_back({1, Symmetry::Sigma, ConstantPotential{0.2}});
  std::map<std::pair<int, int>, DipoleFunction> dip;
  dip.emplace(std::make_pair(0, 1),
              ConstantDipole{Eigen::Vector3d{0.0, 0.0, 1.0}});
  NuclearData nuc{1, 1, 1836.15, 1836.15};
  return ElectronicModel("two_level", std::move(states), std::move(dip), nuc, 0);
}

// Ladder of harmonic-oscillator levels for a single bound "electron":
// E_v = omega0 (v + 1/2), <v|z|v+1> = sqrt((v+1)/(2 omega0)). The dipole
// couples only adjacent levels, so ground-state sum-over-states quantities
// are exactly summable; used for the TRK and gauge diagnostics.
inline ElectronicModel drude_harmonic(int n_states = 5, double omega0 = 0.5) {
  if (n_states < 2) throw ModelError("drude_harmonic needs >= 2 states");
  std::vector<ElectronicState> states;
  std::map<std::pair<int, int>, DipoleFunction> dip;
  for (int v = 0; v < n_states; ++v) {
    states.push_back({v, Symmetry::Sigma, ConstantPotential{omega0 * (v + 0.5)}});
    if (v + 1 < n_states) {
      const double d = std::sqrt((v + 1) / (2.0 * omega0));
      dip.emplace(std::make_pair(v, v + 1),
                  ConstantDipole{Eigen::Vector3d{0.0, 0.0, d}});
    }
  }
  NuclearData nuc{1, 1, 1836.15, 1836.15};
  return ElectronicModel("drude_harmonic", std::move(states), std::move(dip), nuc, 0);
}

// Two Morse curves with a Gaussian z transition dipole; HD-like nuclear
// data (kappa = 1/3) so the permanent-like nuclear dipole is active.
inline ElectronicModel morse_pair() {
  std::vector<ElectronicState> states;
  states.push_back({0, Symmetry::Sigma, MorsePotential{0.17, 0.85, 3.0, 0.0}});
  states.push_back({1, Symmetry::Sigma, MorsePotential{0.10, 0.80, 3.3, 0.12}});
  std::map<std::pair<int, int>, DipoleFunction> dip;
  dip.emplace(std::make_pair(0, 1), GaussianZDipole{1.5, 3.0, 8.0});
  NuclearData nuc{1, 1, 1836.15, 2.0 * 1836.15};
  return ElectronicModel("morse_pair", std::move(states), std::move(dip), nuc, 0);
}

// Sigma ground state coupled to a single Pi state through d_x; exercises
// the perpendicular polarizability path (alpha_perp != 0).
inline ElectronicModel pi_coupled() {
  std::vector<ElectronicState> states;
  states.push_back({0, Symmetry::Sigma, ConstantPotential{0.0}});
  states.push_back({1, Symmetry::Pi, ConstantPotential{0.3}});
  std::map<std::pair<int, int>, DipoleFunction> dip;
  dip.emplace(std::make_pair(0, 1),
              ConstantDipole{Eigen::Vector3d{0.7, 0.0, 0.0}});
  NuclearData nuc{1, 1, 1836.15, 1836.15};
  return ElectronicModel("pi_coupled", std::move(states), std::move(dip), nuc, 0);
}

} // namespace builtin

// --------------------------------------------------------------------------
// JSON model files
//
// { "nuclear": {"Z_A":1,"Z_B":1,"m_A":1836.15,"m_B":3672.3},
//   "states": [{"symmetry":"Sigma","potential":{"kind":"morse",
//                "params":{"D_e":0.17,"a":0.85,"R_e":3.0,"asymptote":0.0}}}],
//   "dipoles": [{"i":0,"j":1,"kind":"gaussian_z",
//                "params":{"amplitude":1.5,"center":3.0,"width":8.0}}],
//   "ground_index": 0 }

inline PotentialCurve potential_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "morse") {
    const auto& p = j.at("params");
    return MorsePotential{p.at("D_e").get<double>(), p.at("a").get<double>(),
                          p.at("R_e").get<double>(),
                          p.value("asymptote", 0.0)};
  }
  if (kind == "constant")
    return ConstantPotential{j.at("params").at("value").get<double>()};
  if (kind == "table") {
    const auto& t = j.at("table");
    return CubicSpline(t.at("R").get<std::vector<double>>(),
                       t.at("E").get<std::vector<double>>());
  }
  throw ModelError("unknown potential kind '" + kind + "'");
}

inline DipoleFunction dipole_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    const auto& p = j.at("params");
    return ConstantDipole{Eigen::Vector3d{
        p.value("x", 0.0), p.value("y", 0.0), p.value("z", 0.0)}};
  }
  if (kind == "gaussian_z") {
    const auto& p = j.at("params");
    return GaussianZDipole{p.at("amplitude").get<double>(),
                           p.at("center").get<double>(),
                           p.at("width").get<double>()};
  }
  if (kind == "table") {
    const auto& t = j.at("table");
    const std::string axis = j.value("axis", "z");
    const int ax = axis == "x" ? 0 : axis == "y" ? 1 : 2;
    return TabulatedDipole{ax, CubicSpline(t.at("R").get<std::vector<double>>(),
                                           t.at("d").get<std::vector<double>>())};
  }
  throw ModelError("unknown dipole kind '" + kind + "'");
}

inline ElectronicModel model_from_json(const nlohmann::json& j,
                                       const std::string& name = "user") {
  const auto& nj = j.at("nuclear");
  NuclearData nuc{nj.at("Z_A").get<int>(), nj.at("Z_B").get<int>(),
                  nj.at("m_A").get<double>(), nj.at("m_B").get<double>()};
  if (nuc.Z_A <= 0 || nuc.Z_B <= 0 || nuc.m_A <= 0.0 || nuc.m_B <= 0.0)
    throw ModelError("nuclear charges and masses must be positive");

  std::vector<ElectronicState> states;
  int idx = 0;
  for (const auto& sj : j.at("states")) {
    const std::string sym = sj.at("symmetry").get<std::string>();
    if (sym != "Sigma" && sym != "Pi")
      throw ModelError("state symmetry must be Sigma or Pi");
    states.push_back({idx++, sym == "Sigma" ? Symmetry::Sigma : Symmetry::Pi,
                      potential_from_json(sj.at("potential"))});
  }

  std::map<std::pair<int, int>, DipoleFunction> dip;
  if (j.contains("dipoles"))
    for (const auto& dj : j.at("dipoles"))
      dip.emplace(std::make_pair(dj.at("i").get<int>(), dj.at("j").get<int>()),
                  dipole_from_json(dj));

  return ElectronicModel(name, std::move(states), std::move(dip), nuc,
                         j.value("ground_index", 0));
}

} // namespace diatom

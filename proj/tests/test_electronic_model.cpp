#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "diatom/electronic_model.hpp"
#include "oracles.hpp"

using namespace diatom;

TEST_CASE("Morse potential values") {
  std::vector<ElectronicState> states;
  states.push_back({0, Symmetry::Sigma, MorsePotential{0.1, 1.0, 2.0, 0.0}});
  ElectronicModel m("morse_test", std::move(states), {}, {1, 1, 1836.15, 1836.15}, 0);

  CHECK(m.potential(0, 2.0) == Catch::Approx(-0.1).margin(1e-15));
  CHECK(std::abs(m.potential(0, 60.0)) < 1e-12);
  CHECK(m.potential(0, 2.5) ==
        Catch::Approx(oracles::morse_value(0.1, 1.0, 2.0, 0.0, 2.5)).epsilon(1e-14));
  CHECK(m.potential(0, 2.5) == Catch::Approx(-0.084518187825382).epsilon(1e-12));

  CHECK_THROWS_AS(m.potential(0, 0.0), DomainError);
  CHECK_THROWS_AS(m.potential(0, -1.0), DomainError);
  CHECK_THROWS_AS(m.potential(2, 2.0), IndexError);
}

TEST_CASE("tabulated potential interpolates and refuses extrapolation") {
  std::vector<double> R, E;
  for (int i = 0; i <= 200; ++i) {
    const double r = 1.0 + 9.0 * i / 200.0;
    R.push_back(r);
    E.push_back(oracles::morse_value(0.17, 0.85, 3.0, 0.0, r));
  }
  std::vector<ElectronicState> states;
  states.push_back({0, Symmetry::Sigma, PotentialCurve(CubicSpline(R, E))});
  ElectronicModel m("tab", std::move(states), {}, {1, 1, 1836.15, 1836.15}, 0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(2.0, 6.0);
  for (int k = 0; k < 50; ++k) {
    const double r = uni(rng);
    CHECK(m.potential(0, r) ==
          Catch::Approx(oracles::morse_value(0.17, 0.85, 3.0, 0.0, r)).margin(1e-6));
  }
  // knots are reproduced exactly
  CHECK(m.potential(0, R[40]) == E[40]);
  CHECK_THROWS_AS(m.potential(0, 0.5), DomainError);
  CHECK_THROWS_AS(m.potential(0, 10.5), DomainError);
  CHECK_THROWS_AS(CubicSpline({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}), ModelError);
  CHECK_THROWS_AS(CubicSpline({1.0, 2.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 0.0}), ModelError);
}

TEST_CASE("transition dipoles and selection rules") {
  const auto two = builtin::two_level();
  for (const double R : {1.0, 2.5, 7.0}) {
    const Eigen::Vector3d d = two.transition_dipole(0, 1, R);
    CHECK(d.x() == 0.0);
    CHECK(d.y() == 0.0);
    CHECK(d.z() == 1.0);
    // symmetric under swap, exactly
    CHECK((two.transition_dipole(1, 0, R) - d).norm() == 0.0);
    // homonuclear diagonal is an exact zero
    CHECK(two.transition_dipole(0, 0, R).norm() == 0.0);
  }

  const auto drude = builtin::drude_harmonic();
  CHECK(drude.transition_dipole(0, 1, 2.0).z() == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(drude.transition_dipole(1, 2, 2.0).z() ==
        Catch::Approx(std::sqrt(2.0 / (2.0 * 0.5))).epsilon(1e-15));
  CHECK(drude.transition_dipole(0, 2, 2.0).norm() == 0.0);

  const auto pi = builtin::pi_coupled();
  CHECK(pi.transition_dipole(0, 1, 3.0).x() == 0.7);
  CHECK(pi.transition_dipole(0, 1, 3.0).z() == 0.0);

  // Sigma-Sigma pair with an x component is rejected at construction
  {
    std::vector<ElectronicState> states;
    states.push_back({0, Symmetry::Sigma, ConstantPotential{0.0}});
    states.push_back({1, Symmetry::Sigma, ConstantPotential{0.2}});
    std::map<std::pair<int, int>, DipoleFunction> dip;
    dip.emplace(std::make_pair(0, 1),
                ConstantDipole{Eigen::Vector3d{0.5, 0.0, 0.0}});
    CHECK_THROWS_AS(ElectronicModel("bad", std::move(states), std::move(dip),
                                    {1, 1, 1836.15, 1836.15}, 0),
                    ModelError);
  }
  // Sigma-Pi pair with a z component is rejected
  {
    std::vector<ElectronicState> states;
    states.push_back({0, Symmetry::Sigma, ConstantPotential{0.0}});
    states.push_back({1, Symmetry::Pi, ConstantPotential{0.3}});
    std::map<std::pair<int, int>, DipoleFunction> dip;
    dip.emplace(std::make_pair(0, 1),
                ConstantDipole{Eigen::Vector3d{0.0, 0.0, 0.5}});
    CHECK_THROWS_AS(ElectronicModel("bad", std::move(states), std::move(dip),
                                    {1, 1, 1836.15, 1836.15}, 0),
                    ModelError);
  }
  // Pi ground states are outside this implementation's scope
  {
    std::vector<ElectronicState> states;
    states.push_back({0, Symmetry::Pi, ConstantPotential{0.0}});
    CHECK_THROWS_AS(
        ElectronicModel("bad", std::move(states), {}, {1, 1, 1836.15, 1836.15}, 0),
        ModelError);
  }
}

TEST_CASE("nuclear dipole term") {
  const NuclearData homo{1, 1, 1836.15, 1836.15};
  CHECK(homo.kappa() == 0.0);

  const auto hd = builtin::morse_pair();  // HD-like: kappa = 1/3
  CHECK(hd.nuclear().kappa() == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(hd.nuclear_dipole_z(1.4) == Catch::Approx(1.4 / 3.0).epsilon(1e-15));
  CHECK(hd.nuclear().reduced_mass() == Catch::Approx(1224.1).epsilon(1e-12));

  // kappa = 0 despite heteronuclear charges when Z_A m_B == Z_B m_A
  const NuclearData balanced{3, 1, 3.0 * 1836.15, 1836.15};
  CHECK(balanced.kappa() == 0.0);

  // linear in R
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(0.5, 20.0);
  for (int k = 0; k < 20; ++k) {
    const double R = uni(rng);
    CHECK(hd.nuclear_dipole_z(2.0 * R) ==
          Catch::Approx(2.0 * hd.nuclear_dipole_z(R)).epsilon(1e-14));
  }
}

TEST_CASE("built-in potentials are smooth with the analytic slope") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uni(1.5, 8.0);
  const auto models = {builtin::two_level(), builtin::drude_harmonic(),
                       builtin::morse_pair(), builtin::pi_coupled()};
  for (const auto& m : models) {
    for (int n = 0; n < m.num_states(); ++n) {
      for (int k = 0; k < 100; ++k) {
        const double R = uni(rng);
        const double h = 1e-6;
        const double fd = (m.potential(n, R + h) - m.potential(n, R - h)) / (2.0 * h);
        const double an = m.potential_derivative(n, R);
        CHECK(std::abs(fd - an) <= std::max(1e-6 * std::abs(an), 1e-9));
      }
    }
  }
}

TEST_CASE("dipole matrix symmetry on random R") {
  const auto m = builtin::morse_pair();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(1.5, 8.0);
  for (int k = 0; k < 50; ++k) {
    const double R = uni(rng);
    for (int i = 0; i < m.num_states(); ++i)
      for (int j = 0; j < m.num_states(); ++j)
        CHECK((m.transition_dipole(i, j, R) - m.transition_dipole(j, i, R)).norm() ==
              0.0);
  }
}

TEST_CASE("model JSON round trip") {
  const char* text = R"({
    "nuclear": {"Z_A": 1, "Z_B": 1, "m_A": 1836.15, "m_B": 3672.3},
    "states": [
      {"symmetry": "Sigma",
       "potential": {"kind": "morse",
                     "params": {"D_e": 0.17, "a": 0.85, "R_e": 3.0, "asymptote": 0.0}}},
      {"symmetry": "Sigma",
       "potential": {"kind": "morse",
                     "params": {"D_e": 0.10, "a": 0.80, "R_e": 3.3, "asymptote": 0.12}}}
    ],
    "dipoles": [
      {"i": 0, "j": 1, "kind": "gaussian_z",
       "params": {"amplitude": 1.5, "center": 3.0, "width": 8.0}}
    ],
    "ground_index": 0
  })";
  const auto user = model_from_json(nlohmann::json::parse(text), "user_morse");
  const auto ref = builtin::morse_pair();
  for (const double R : {2.0, 3.0, 4.5}) {
    CHECK(user.potential(0, R) == ref.potential(0, R));
    CHECK(user.potential(1, R) == ref.potential(1, R));
    CHECK(user.transition_dipole(0, 1, R).z() == ref.transition_dipole(0, 1, R).z());
  }
  CHECK(user.nuclear().kappa() == ref.nuclear().kappa());

  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(
                      R"({"nuclear":{"Z_A":0,"Z_B":1,"m_A":1.0,"m_B":1.0},
                          "states":[{"symmetry":"Sigma",
                                     "potential":{"kind":"constant","params":{"value":0.0}}}],
                          "ground_index":0})")),
                  ModelError);
}

TEST_CASE("tabulated potentials and dipoles through JSON") {
  nlohmann::json j;
  j["nuclear"] = {{"Z_A", 1}, {"Z_B", 1}, {"m_A", 1836.15}, {"m_B", 1836.15}};
  std::vector<double> R, E, d;
  for (int i = 0; i <= 30; ++i) {
    const double r = 1.0 + 6.0 * i / 30.0;
    R.push_back(r);
    E.push_back(0.01 * (r - 3.0) * (r - 3.0));
    d.push_back(0.5 + 0.1 * r);
  }
  j["states"] = {{{"symmetry", "Sigma"},
                  {"potential", {{"kind", "table"}, {"table", {{"R", R}, {"E", E}}}}}},
                 {{"symmetry", "Sigma"},
                  {"potential", {{"kind", "constant"}, {"params", {{"value", 0.4}}}}}}};
  j["dipoles"] = {{{"i", 0},
                   {"j", 1},
                   {"kind", "table"},
                   {"axis", "z"},
                   {"table", {{"R", R}, {"d", d}}}}};
  j["ground_index"] = 0;

  const auto m = model_from_json(j, "tabulated");
  CHECK(m.potential(0, R[10]) == E[10]);  // knots exact
  CHECK(m.potential(0, 3.1) == Catch::Approx(0.01 * 0.1 * 0.1).margin(1e-7));
  CHECK(m.transition_dipole(0, 1, 2.0).z() == Catch::Approx(0.7).margin(1e-7));
  CHECK(m.transition_dipole(0, 1, 2.0).x() == 0.0);
  CHECK_THROWS_AS(m.transition_dipole(0, 1, 0.5), DomainError);
}

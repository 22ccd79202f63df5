#include <catch2/catch_amalgamated.hpp>

#include "diatom/radial.hpp"
#include "diatom/rotor.hpp"
#include "oracles.hpp"

using namespace diatom;

TEST_CASE("rotor basis bookkeeping") {
  const RotorBasis b(40, 0);
  CHECK(b.size() == 41);
  CHECK(b.j_of(0) == 0);

  const RotorBasis bm(10, -3);
  CHECK(bm.size() == 8);
  CHECK(bm.j_of(0) == 3);

  CHECK_THROWS_AS(RotorBasis(2, 5), DomainError);
}

TEST_CASE("cos and cos^2 matrix elements") {
  const RotorBasis b(6, 0);
  const Eigen::MatrixXd C1 = cos_theta_matrix(b);
  const Eigen::MatrixXd C2 = cos2_theta_matrix(b);

  CHECK(C2(0, 0) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(C1(0, 1) == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(C2(0, 2) == Catch::Approx(2.0 / (3.0 * std::sqrt(5.0))).epsilon(1e-14));

  // quadrature oracle over associated Legendre products
  const auto cosf = [](double x) { return x; };
  const auto cos2f = [](double x) { return x * x; };
  CHECK(C1(0, 1) ==
        Catch::Approx(oracles::legendre_matrix_element(0, 1, 0, cosf)).epsilon(1e-12));
  CHECK(C2(0, 2) ==
        Catch::Approx(oracles::legendre_matrix_element(0, 2, 0, cos2f)).epsilon(1e-12));

  for (const int m : {0, 1, 2}) {
    const RotorBasis bm(6, m);
    const Eigen::MatrixXd A1 = cos_theta_matrix(bm);
    const Eigen::MatrixXd A2 = cos2_theta_matrix(bm);
    CHECK((A1 - A1.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((A2 - A2.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < bm.size(); ++i)
      for (int k = 0; k < bm.size(); ++k) {
        const int j = bm.j_of(i), jp = bm.j_of(k);
        const double o1 = std::abs(j - jp) == 1
                              ? oracles::legendre_matrix_element(j, jp, m, cosf)
                              : 0.0;
        const double o2 = (j == jp || std::abs(j - jp) == 2)
                              ? oracles::legendre_matrix_element(j, jp, m, cos2f)
                              : 0.0;
        REQUIRE(A1(i, k) == Catch::Approx(o1).margin(1e-12));
        REQUIRE(A2(i, k) == Catch::Approx(o2).margin(1e-12));
      }
  }
}

TEST_CASE("sine grid kinetic operator") {
  const SineGrid g(0.0, 10.0, 64);
  const Eigen::MatrixXd S = g.sine_transform();
  CHECK((S * S.transpose() - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() <
        1e-12);

  // harmonic fixture: levels omega (v + 1/2)
  const double mu = 100.0, omega = 0.05, Re = 5.0;
  Eigen::MatrixXd H = g.kinetic_matrix(mu);
  const Eigen::VectorXd x = g.points();
  for (int i = 0; i < g.n; ++i) {
    const double u = x[i] - Re;
    H(i, i) += 0.5 * mu * omega * omega * u * u;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  for (int v = 0; v < 4; ++v)
    CHECK(es.eigenvalues()[v] == Catch::Approx(omega * (v + 0.5)).epsilon(1e-9));
}

TEST_CASE("Morse vibrational levels match the analytic spectrum") {
  const auto hd = builtin::morse_pair();
  const RadialGrid grid(1.3, 8.0, 400);
  const VibrationalResult res = vibrational_eigenstates(hd, grid, 3);

  const double mu = hd.nuclear().reduced_mass();
  for (int v = 0; v < 3; ++v)
    CHECK(res.energies[v] ==
          Catch::Approx(oracles::morse_level(0.17, 0.85, mu, v)).margin(1e-7));
  CHECK(res.warnings.empty());

  // wavefunctions are grid-orthonormal
  const Eigen::MatrixXd gram = res.wavefunctions.transpose() * res.wavefunctions;
  CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Morse bound-state count") {
  // small fixture: D_e = 0.1, a = 1, mu = 100 -> 4 bound levels
  std::vector<ElectronicState> states;
  states.push_back({0, Symmetry::Sigma, MorsePotential{0.1, 1.0, 3.0, 0.0}});
  const ElectronicModel m("count_fixture", std::move(states), {}, {1, 1, 200.0, 200.0},
                          0);
  REQUIRE(m.nuclear().reduced_mass() == Catch::Approx(100.0));
  CHECK(oracles::morse_bound_count(0.1, 1.0, 100.0) == 4);

  const RadialGrid grid(0.3, 20.0, 700);
  const VibrationalResult res = vibrational_eigenstates(m, grid, 8, false);
  int below = 0;
  for (int v = 0; v < 8; ++v)
    if (res.energies[v] < 0.0) ++below;
  CHECK(below == 4);
}

TEST_CASE("grid warnings") {
  const auto hd = builtin::morse_pair();
  // too-narrow box: inner wall barely above the covered well
  const RadialGrid narrow(2.8, 3.4, 32);
  const VibrationalResult res = vibrational_eigenstates(hd, narrow, 1, false);
  CHECK_FALSE(res.warnings.empty());

  // coarse grid triggers the doubling-convergence warning
  const RadialGrid coarse(1.3, 30.0, 32);
  const VibrationalResult res2 = vibrational_eigenstates(hd, coarse, 3, true);
  bool unconverged = false;
  for (const auto& w : res2.warnings)
    if (w.find("unconverged") != std::string::npos) unconverged = true;
  CHECK(unconverged);

  CHECK_THROWS_AS(RadialGrid(-1.0, 8.0, 64), DomainError);
  CHECK_THROWS_AS(RadialGrid(1.0, 8.0, 16), DomainError);
}

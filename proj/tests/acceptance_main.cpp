// Acceptance suite: runs each release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits with the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diatom/diatom.hpp"
#include "oracles.hpp"

using namespace diatom;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, double budget_s,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over runtime budget ") +
              std::to_string(budget_s) + " s";
  }
  std::printf("[%s] %d %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              secs, detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

int main() {
  // 1. Static-limit identity of the dynamic polarizability.
  criterion(1, "static-limit identity (omega_L = 1e-6)", 1.0, [](std::string& detail) {
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> uni(2.0, 5.5);
    const auto models = {builtin::two_level(), builtin::drude_harmonic(),
                         builtin::morse_pair(), builtin::pi_coupled()};
    double worst = 0.0;
    for (const auto& m : models)
      for (int k = 0; k < 10; ++k) {
        const double R = uni(rng);
        const AlphaPair s = static_polarizability(m, 0, R);
        const AlphaPair d = dynamic_polarizability(m, 0, R, 1e-6, Gauge::length);
        if (s.par != 0.0) worst = std::max(worst, std::abs(d.par - s.par) / std::abs(s.par));
        if (s.perp != 0.0)
          worst = std::max(worst, std::abs(d.perp - s.perp) / std::abs(s.perp));
      }
    detail = "max relative deviation " + fmt17(worst);
    return worst < 1e-9;
  });

  // 2. dc Stark oracle with quartic residual scaling.
  criterion(2, "dc Stark second-order residual scales as E^4", 1.0,
            [](std::string& detail) {
              const auto two = builtin::two_level();
              const auto residual = [&](double E) {
                const double exact = oracles::two_level_ground(0.2, 1.0, E);
                return std::abs(exact -
                                dc_surface_correction(two, 0, 2.0, 0.0, E).total);
              };
              const double ratio = residual(4e-3) / residual(2e-3);
              detail = "residual ratio under field halving = " + fmt17(ratio);
              return ratio > 8.0 && ratio < 24.0;
            });

  // 3. Floquet consistency triangle.
  criterion(3, "Floquet triangle: extended matrix / monodromy / perturbation", 10.0,
            [](std::string& detail) {
              const auto two = builtin::two_level();
              const double w = 0.1, E = 2e-3;
              const FloquetAutoResult fl = quasienergies_auto(two, 2.0, 0.0, E, w);
              const double a = fl.result.tracked_quasienergy;

              const auto eps = monodromy_quasienergies(two, 2.0, 0.0, E, w, 20000);
              double ab = 1e9;
              for (const double e : eps)
                ab = std::min(ab, quasienergy_distance(e, a, w));

              const double alpha =
                  dynamic_polarizability(two, 0, 2.0, w, Gauge::length).par;
              const double c = -0.25 * alpha * E * E;

              const double ac = std::abs(a - c);
              double bc = 1e9;
              for (const double e : eps)
                bc = std::min(bc, quasienergy_distance(e, c, w));

              detail = "floquet-monodromy " + fmt17(ab) + " Ha; |floquet-PT| " +
                       fmt17(ac) + "; |monodromy-PT| " + fmt17(bc);
              const double budget = 0.02 * std::abs(a);
              return ab < 1e-8 && ac < budget && bc < budget;
            });

  // 4. Factor-1/4 bookkeeping between the dc and ac rotor Hamiltonians.
  criterion(4, "cycle-averaged dc rotor Hamiltonian equals static-alpha ac one", 1.0,
            [](std::string& detail) {
              const auto two = builtin::two_level();
              const RotorBasis basis(12, 0);
              BuildOptions opts;
              opts.basis = basis;
              opts.R_fix = 2.0;
              const double E = 0.01, w = 0.05;
              PolarizabilityCurve stat;
              stat.gauge = Gauge::length;
              stat.omega = 0.0;
              stat.samples.push_back({2.0, 10.0, 0.0});
              FieldSpec acf;
              acf.kind = FieldKind::ac;
              acf.amplitude = E;
              acf.omega = w;
              const auto Hdc =
                  build_effective(two, stat, acf, Mode::rotor, Limit::dc, opts);
              PolarizabilityCurve stat_ac = stat;
              stat_ac.omega = w;
              const auto Hac =
                  build_effective(two, stat_ac, acf, Mode::rotor, Limit::ac, opts);

              const double T = 2.0 * M_PI / w;
              const int K = 256;
              Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(basis.size(), basis.size());
              double off = 0.0;
              for (int k = 0; k < K; ++k) {
                avg += Hdc.rotor_matrix(T * k / K);
                off += Hdc.coefficients_at(T * k / K).offset;
              }
              avg /= K;
              off /= K;
              avg += (off * Eigen::VectorXd::Ones(basis.size())).asDiagonal();
              Eigen::MatrixXd ac = Hac.rotor_matrix(0.0);
              ac += (Hac.coefficients_at(0.0).offset *
                     Eigen::VectorXd::Ones(basis.size()))
                        .asDiagonal();
              const double dev = (avg - ac).cwiseAbs().maxCoeff();
              detail = "max elementwise deviation " + fmt17(dev);
              return dev < 1e-10;
            });

  // 5. Gauge-truncation diagnostics.
  criterion(5, "termwise gauge identity, TRK sum and summed difference", 1.0,
            [](std::string& detail) {
              std::mt19937 rng(11);
              std::uniform_real_distribution<double> uniR(2.2, 5.5);
              std::uniform_real_distribution<double> uniW(0.005, 0.09);
              double worst = 0.0;
              const auto models = {builtin::two_level(), builtin::morse_pair()};
              for (const auto& m : models)
                for (int k = 0; k < 10; ++k) {
                  const GaugeReport rep = gauge_discrepancy_report(
                      m, 0, uniR(rng), uniW(rng), m.num_states() - 1);
                  for (const auto& t : rep.terms) {
                    if (t.dipole_sq == 0.0) continue;
                    worst = std::max(worst, std::abs(t.difference - t.closed_form) /
                                                std::abs(t.closed_form));
                  }
                }

              const auto drude = builtin::drude_harmonic();
              const double w = 0.13;
              const GaugeReport rep =
                  gauge_discrepancy_report(drude, 0, 2.0, w, drude.num_states() - 1);
              const double trk_err = std::abs(rep.trk_sum - 0.5);
              const double sum_err =
                  std::abs(rep.summed_difference - 1.0 / (w * w)) / (1.0 / (w * w));
              detail = "identity rel " + fmt17(worst) + ", |TRK-1/2| " + fmt17(trk_err) +
                       ", summed rel " + fmt17(sum_err);
              return worst < 1e-12 && trk_err < 1e-12 && sum_err < 1e-10;
            });

  // 6. Rotor dynamics: revival, weak-pulse transfer, norm drift.
  criterion(6, "rotor revival, first-order j=0->2 transfer, norm drift", 60.0,
            [](std::string& detail) {
              const auto two = builtin::two_level();
              const RotorBasis basis(8, 0);
              BuildOptions opts;
              opts.basis = basis;
              opts.R_fix = 2.0;

              PolarizabilityCurve stat;
              stat.gauge = Gauge::length;
              stat.omega = 0.0;
              stat.samples.push_back({2.0, 10.0, 0.0});
              FieldSpec off;
              off.kind = FieldKind::dc;
              off.amplitude = 0.0;
              const auto Hfree =
                  build_effective(two, stat, off, Mode::rotor, Limit::dc, opts);

              Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis.size());
              c[0] = 1.0;
              c[1] = std::complex<double>(0.6, 0.2);
              c[2] = 0.5;
              c[4] = std::complex<double>(0.0, 0.3);
              Wavepacket psi = Wavepacket::rotor_coeffs(basis, c);
              const double before = expectation(psi, Observable::cos2_theta);
              const double Trev = M_PI / Hfree.B;
              psi = propagate(psi, Hfree, 0.0, Trev, Trev / 1000.0);
              const double revival_err =
                  std::abs(expectation(psi, Observable::cos2_theta) - before);

              // weak Gaussian pulse against the first-order quadrature oracle
              const double E0 = 3.4e-3, wL = 0.1, sigma = 2e-6, tmid = 2500.0;
              FieldSpec pulse;
              pulse.kind = FieldKind::ac;
              pulse.amplitude = E0;
              pulse.omega = wL;
              pulse.envelope = GaussianEnvelope{sigma, tmid};
              const double alpha = 40.0 / 3.0;
              PolarizabilityCurve dyn;
              dyn.gauge = Gauge::length;
              dyn.omega = wL;
              dyn.samples.push_back({2.0, alpha, 0.0});
              const auto Hp =
                  build_effective(two, dyn, pulse, Mode::rotor, Limit::ac, opts);
              Wavepacket p0 = Wavepacket::rotor_state(basis, 0);
              const double dt = 0.5;
              Wavepacket p1 = propagate(p0, Hp, 0.0, 5000.0, dt);  // 10^4 steps
              const double P2 = j_populations(p1)[2];
              const double drift = std::abs(p1.norm() - 1.0) / 5000.0;

              const auto c2 = [&](double t) {
                const double eta = envelope_value(pulse.envelope, t);
                return -0.25 * E0 * E0 * eta * eta * alpha;
              };
              const double P2_oracle = oracles::first_order_probability(
                  c2, 2.0 / (3.0 * std::sqrt(5.0)), 6.0 * Hp.B, 0.0, 5000.0);

              detail = "revival " + fmt17(revival_err) + "; P2 " + fmt17(P2) +
                       " vs oracle " + fmt17(P2_oracle) + "; drift/time " + fmt17(drift);
              return revival_err < 1e-8 && P2 > 5e-5 && P2 < 2e-4 &&
                     std::abs(P2 - P2_oracle) < 0.05 * P2_oracle && drift < 1e-9;
            });

  // 7. Vibrational spectrum on the radial grid.
  criterion(7, "Morse vibrational levels match the analytic formula", 10.0,
            [](std::string& detail) {
              const auto hd = builtin::morse_pair();
              const RadialGrid grid(1.3, 8.0, 400);
              const VibrationalResult res = vibrational_eigenstates(hd, grid, 3);
              const double mu = hd.nuclear().reduced_mass();
              double worst = 0.0;
              for (int v = 0; v < 3; ++v)
                worst = std::max(worst, std::abs(res.energies[v] -
                                                 oracles::morse_level(0.17, 0.85, mu, v)));
              detail = "max |DVR - analytic| " + fmt17(worst) + " Ha";
              return worst < 1e-7 && res.warnings.empty();
            });

  // 8. CoM trap frequency against the harmonic expansion.
  criterion(8, "optical trap frequency from <X> oscillation", 30.0,
            [](std::string& detail) {
              const auto two = builtin::two_level();
              const double alpha_bar = 10.0, E0 = 0.01, w0 = 1000.0;
              const double M = two.nuclear().total_mass();
              const double Omega = (E0 / w0) * std::sqrt(alpha_bar / M);
              const double T = 2.0 * M_PI / Omega;

              FieldSpec f;
              f.kind = FieldKind::ac;
              f.amplitude = E0;
              f.omega = 0.1;
              f.profile = GaussianBeamProfile{w0, 0.0};

              const SineGrid grid(-180.0, 180.0, 256);
              const double x2_gs = 1.0 / (2.0 * M * Omega);
              Wavepacket psi = Wavepacket::com_gaussian(grid, 30.0, x2_gs);
              const ComTrajectory traj =
                  com_trap_dynamics(two, alpha_bar, f, psi, 0.0, 3.0 * T, T / 2000.0);

              std::vector<double> crossings;
              for (std::size_t k = 1; k < traj.t.size(); ++k)
                if (traj.x_mean[k - 1] * traj.x_mean[k] < 0.0) {
                  const double fr =
                      traj.x_mean[k - 1] / (traj.x_mean[k - 1] - traj.x_mean[k]);
                  crossings.push_back(traj.t[k - 1] +
                                      fr * (traj.t[k] - traj.t[k - 1]));
                }
              if (crossings.size() < 4) {
                detail = "too few <X> zero crossings";
                return false;
              }
              double spacing = 0.0;
              for (std::size_t k = 1; k < crossings.size(); ++k)
                spacing += crossings[k] - crossings[k - 1];
              spacing /= (crossings.size() - 1);
              const double Omega_meas = M_PI / spacing;
              const double rel = std::abs(Omega_meas - Omega) / Omega;
              detail = "Omega measured " + fmt17(Omega_meas) + " vs predicted " +
                       fmt17(Omega) + " (rel " + fmt17(rel) + ")";
              return rel < 0.02;
            });

  // 9. Determinism of every shipped scenario.
  criterion(9, "shipped scenarios reproduce byte-identical CSV", 600.0,
            [](std::string& detail) {
              namespace fs = std::filesystem;
              int checked = 0;
              for (const auto& entry : fs::directory_iterator("scenarios")) {
                if (entry.path().extension() != ".json") continue;
                const json cfg = load_json_file(entry.path().string());
                const std::string stem = entry.path().stem().string();
                const std::string p1 = "out/accept_" + stem + "_run1";
                const std::string p2 = "out/accept_" + stem + "_run2";
                const RunOutcome r1 = run_scenario(cfg, p1);
                const RunOutcome r2 = run_scenario(cfg, p2);
                if (r1.exit_code != 0 || r2.exit_code != 0) {
                  detail = stem + " failed to run";
                  return false;
                }
                if (slurp(p1 + ".csv") != slurp(p2 + ".csv")) {
                  detail = stem + " CSV differs between runs";
                  return false;
                }
                if (fs::exists(p1 + ".gauge.json") &&
                    slurp(p1 + ".gauge.json") != slurp(p2 + ".gauge.json")) {
                  detail = stem + " gauge report differs between runs";
                  return false;
                }
                ++checked;
              }
              detail = std::to_string(checked) + " scenarios, all byte-identical";
              return checked == 9;
            });

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures;
}

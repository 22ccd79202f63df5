#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "diatom/effective.hpp"
#include "diatom/electronic_model.hpp"
#include "diatom/errors.hpp"
#include "diatom/fields.hpp"
#include "diatom/floquet.hpp"
#include "diatom/perturbation.hpp"
#include "diatom/propagate.hpp"
#include "diatom/radial.hpp"
#include "diatom/version.hpp"
#include "diatom/wavepacket.hpp"

// Batch front-end: JSON scenario configs, task dispatch, deterministic CSV
// output and a run manifest. Exit codes: 0 success, 2 validation error,
// 3 numerical error, 4 I/O error. All floats are written with 17
// significant digits so reruns are byte-comparable; no primary code path
// uses randomness.

namespace diatom {

using nlohmann::json;

// %.17g round-trip decimal formatting
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

// --------------------------------------------------------------------------
// Schema parsing

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks = {
      "polarizability", "surface_dc", "surface_ac", "floquet", "align",
      "orient",         "vib",        "trap",       "gauge_compare"};
  return tasks;
}

inline FieldSpec field_from_json(const json& j) {
  FieldSpec f;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dc")
    f.kind = FieldKind::dc;
  else if (kind == "ac")
    f.kind = FieldKind::ac;
  else
    throw ConfigError("field.kind must be 'dc' or 'ac'");
  f.amplitude = j.at("amplitude").get<double>();
  f.omega = j.value("omega", 0.0);
  if (j.contains("envelope")) {
    const auto& e = j.at("envelope");
    const std::string ek = e.at("kind").get<std::string>();
    if (ek == "constant")
      f.envelope = ConstantEnvelope{};
    else if (ek == "gaussian")
      f.envelope = GaussianEnvelope{e.at("sigma").get<double>(),
                                    e.value("t0", 0.0)};
    else if (ek == "linear_ramp")
      f.envelope = LinearRampEnvelope{e.at("t_on").get<double>(),
                                      e.at("t_off").get<double>()};
    else
      throw ConfigError("field.envelope.kind must be constant, gaussian or linear_ramp");
  }
  if (j.contains("profile")) {
    const auto& p = j.at("profile");
    const std::string pk = p.at("kind").get<std::string>();
    if (pk == "uniform")
      f.profile = UniformProfile{};
    else if (pk == "gaussian_beam")
      f.profile = GaussianBeamProfile{p.at("waist").get<double>(),
                                      p.value("center", 0.0)};
    else
      throw ConfigError("field.profile.kind must be uniform or gaussian_beam");
  }
  return f;
}

// Sweep axis: {"values":[...]} or {"min":a,"max":b,"n":k} (inclusive ends).
inline std::vector<double> sweep_axis(const json& j) {
  if (j.contains("values")) return j.at("values").get<std::vector<double>>();
  const double lo = j.at("min").get<double>();
  const double hi = j.at("max").get<double>();
  const int n = j.at("n").get<int>();
  if (n < 1) throw ConfigError("sweep axis needs n >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

inline std::shared_ptr<const ElectronicModel> resolve_model(const json& cfg) {
  const auto& mj = cfg.at("model");
  if (mj.is_string()) {
    const std::string name = mj.get<std::string>();
    if (name == "two_level") return std::make_shared<ElectronicModel>(builtin::two_level());
    if (name == "drude_harmonic")
      return std::make_shared<ElectronicModel>(builtin::drude_harmonic());
    if (name == "morse_pair") return std::make_shared<ElectronicModel>(builtin::morse_pair());
    if (name == "pi_coupled") return std::make_shared<ElectronicModel>(builtin::pi_coupled());
    throw ConfigError("unknown built-in model '" + name + "'");
  }
  if (mj.is_object() && mj.contains("path")) {
    const std::string path = mj.at("path").get<std::string>();
    return std::make_shared<ElectronicModel>(
        model_from_json(load_json_file(path), std::filesystem::path(path).stem().string()));
  }
  if (mj.is_object())
    return std::make_shared<ElectronicModel>(model_from_json(mj, "inline"));
  throw ConfigError("model must be a built-in name, {\"path\": ...} or an inline object");
}

// --------------------------------------------------------------------------
// Validation (no compute)

inline std::vector<std::string> validate_scenario(const json& cfg,
                                                  const std::string& cli_task = "") {
  std::vector<std::string> bad;
  if (!cfg.is_object()) {
    bad.push_back("scenario must be a JSON object");
    return bad;
  }

  std::string task = cfg.value("task", cli_task);
  if (task.empty()) {
    bad.push_back("task: required");
    return bad;
  }
  if (!cli_task.empty() && cfg.contains("task") && task != cli_task)
    bad.push_back("task: config says '" + task + "' but the command line asked for '" +
                  cli_task + "'");
  bool known = false;
  for (const auto& t : known_tasks()) known = known || t == task;
  if (!known) {
    bad.push_back("task: unknown task '" + task + "'");
    return bad;
  }

  if (!cfg.contains("model")) {
    bad.push_back("model: required");
  } else {
    try {
      resolve_model(cfg);
    } catch (const Error& e) {
      bad.push_back(std::string("model: ") + e.what());
    }
  }

  const json num = cfg.value("numerics", json::object());
  const int j_max = num.value("j_max", 40);
  const int m = num.value("m", 0);
  if (j_max < 0) bad.push_back("numerics.j_max: must be >= 0");
  if (j_max >= 0 && j_max < std::abs(m))
    bad.push_back("numerics.j_max: must be >= |m|");
  if (num.value("resonance_tol", default_resonance_tol) <= 0.0)
    bad.push_back("numerics.resonance_tol: must be positive");
  if (num.value("fourier_cutoff", 8) < 1)
    bad.push_back("numerics.fourier_cutoff: must be >= 1");

  const bool needs_field =
      task == "surface_ac" || task == "floquet" || task == "align" ||
      task == "orient" || task == "trap";
  if (needs_field && !cfg.contains("field")) {
    bad.push_back("field: required for " + task);
  } else if (cfg.contains("field")) {
    try {
      const FieldSpec f = field_from_json(cfg.at("field"));
      const bool wants_ac =
          task == "surface_ac" || task == "floquet" || task == "align" || task == "trap";
      if (wants_ac && f.kind != FieldKind::ac)
        bad.push_back("field.kind: " + task + " needs an ac field");
      if (task == "orient" && f.kind != FieldKind::dc)
        bad.push_back("field.kind: orient needs a dc field");
      if (wants_ac && !(f.omega > 0.0))
        bad.push_back("field.omega required for " + task);
      if (task == "trap" && !std::holds_alternative<GaussianBeamProfile>(f.profile))
        bad.push_back("field.profile: trap needs a gaussian_beam profile");
      if (!std::isfinite(f.amplitude)) bad.push_back("field.amplitude: must be finite");
    } catch (const Error& e) {
      bad.push_back(std::string("field: ") + e.what());
    } catch (const json::exception& e) {
      bad.push_back(std::string("field: ") + e.what());
    }
  }

  const json sweep = cfg.value("sweep", json::object());
  const auto check_axis = [&](const char* key, bool required) {
    if (!sweep.contains(key)) {
      if (required) bad.push_back(std::string("sweep.") + key + ": required for " + task);
      return;
    }
    try {
      if (sweep_axis(sweep.at(key)).empty())
        bad.push_back(std::string("sweep.") + key + ": empty grid");
    } catch (const Error& e) {
      bad.push_back(std::string("sweep.") + key + ": " + e.what());
    } catch (const json::exception& e) {
      bad.push_back(std::string("sweep.") + key + ": " + e.what());
    }
  };
  if (task == "polarizability" || task == "gauge_compare") check_axis("R", true);
  if (task == "surface_dc" || task == "surface_ac" || task == "floquet") {
    check_axis("R", true);
    check_axis("E", true);
    check_axis("theta", false);
  }
  if (task == "gauge_compare") check_axis("omega", true);

  const bool needs_time = task == "align" || task == "orient" || task == "trap";
  if (needs_time) {
    if (!cfg.contains("time")) {
      bad.push_back("time: required for " + task);
    } else {
      const auto& tj = cfg.at("time");
      const double t0 = tj.value("t0", 0.0);
      if (!tj.contains("t1"))
        bad.push_back("time.t1: required");
      else if (!(tj.at("t1").get<double>() > t0))
        bad.push_back("time.t1: must be greater than t0");
      if (!tj.contains("dt"))
        bad.push_back("time.dt: required");
      else if (!(tj.at("dt").get<double>() > 0.0))
        bad.push_back("time.dt: must be positive");
      if (tj.value("sample_every", 1) < 1)
        bad.push_back("time.sample_every: must be >= 1");
    }
  }

  if (task == "vib" || num.value("mode", "rotor") == std::string("rovib")) {
    if (!num.contains("radial")) {
      bad.push_back("numerics.radial: required (R_min, R_max, n)");
    } else {
      try {
        const auto& rj = num.at("radial");
        RadialGrid(rj.at("R_min").get<double>(), rj.at("R_max").get<double>(),
                   rj.at("n").get<int>());
      } catch (const Error& e) {
        bad.push_back(std::string("numerics.radial: ") + e.what());
      } catch (const json::exception& e) {
        bad.push_back(std::string("numerics.radial: ") + e.what());
      }
    }
  }
  if (task == "vib" && num.value("n_levels", 3) < 1)
    bad.push_back("numerics.n_levels: must be >= 1");

  if ((task == "align" || task == "orient") &&
      num.value("mode", "rotor") == std::string("rotor") && !num.contains("R_fix") &&
      cfg.contains("model")) {
    try {
      if (!resolve_model(cfg)->equilibrium_radius())
        bad.push_back("numerics.R_fix: required (model has no Morse ground curve)");
    } catch (const Error&) {
      // already reported above
    }
  }

  if (task == "trap") {
    if (!num.contains("com")) {
      bad.push_back("numerics.com: required (x_min, x_max, n, alpha_bar, x0, sigma2)");
    } else {
      const auto& cj = num.at("com");
      if (cj.value("alpha_bar", 0.0) <= 0.0)
        bad.push_back("numerics.com.alpha_bar: must be positive");
      if (cj.value("sigma2", 0.0) <= 0.0)
        bad.push_back("numerics.com.sigma2: must be positive");
      if (cj.value("n", 0) < 4) bad.push_back("numerics.com.n: must be >= 4");
      if (!(cj.value("x_max", 0.0) > cj.value("x_min", 0.0)))
        bad.push_back("numerics.com: needs x_max > x_min");
    }
  }

  if (task == "gauge_compare" && num.contains("gauge"))
    bad.push_back("numerics.gauge: gauge_compare reports both gauges; remove the key");
  if (num.contains("gauge")) {
    const std::string g = num.at("gauge").get<std::string>();
    if (g != "length" && g != "momentum")
      bad.push_back("numerics.gauge: must be 'length' or 'momentum'");
  }
  return bad;
}

// --------------------------------------------------------------------------
// Execution

namespace detail {

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct TaskOutput {
  std::vector<std::string> columns;
  std::vector<std::string> rows;  // formatted CSV lines, deterministic order
  json diagnostics = json::object();
  std::vector<std::string> warnings;
  json extra_json;  // gauge reports; empty otherwise
  std::optional<Wavepacket> final_state;  // for output.checkpoint
};

inline std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

// ---- task: polarizability -------------------------------------------------

inline TaskOutput run_polarizability(const ElectronicModel& model, const json& cfg,
                                     int threads) {
  const json sweep = cfg.value("sweep", json::object());
  const std::vector<double> Rs = sweep_axis(sweep.at("R"));
  const std::vector<double> omegas = sweep.contains("omega")
                                         ? sweep_axis(sweep.at("omega"))
                                         : std::vector<double>{0.0};
  const json num = cfg.value("numerics", json::object());
  const Gauge gauge =
      num.value("gauge", "length") == std::string("momentum") ? Gauge::momentum
                                                              : Gauge::length;
  const double tol = num.value("resonance_tol", default_resonance_tol);
  const int g = model.ground_index();

  TaskOutput out;
  out.columns = {"R", "alpha_par", "alpha_perp", "gauge", "omega"};
  const int npts = static_cast<int>(Rs.size() * omegas.size());
  out.rows.resize(static_cast<std::size_t>(npts));
  parallel_for(npts, threads, [&](int idx) {
    const double w = omegas[static_cast<std::size_t>(idx) / Rs.size()];
    const double R = Rs[static_cast<std::size_t>(idx) % Rs.size()];
    const AlphaPair a = (w == 0.0 && gauge == Gauge::length)
                            ? static_polarizability(model, g, R)
                            : dynamic_polarizability(model, g, R, w, gauge, tol);
    out.rows[static_cast<std::size_t>(idx)] =
        join_csv({fmt17(R), fmt17(a.par), fmt17(a.perp), to_string(gauge), fmt17(w)});
  });
  if (gauge == Gauge::momentum)
    out.warnings.push_back(
        "momentum-gauge polarizabilities on a truncated basis are unreliable");
  out.diagnostics["points"] = npts;
  return out;
}

// ---- tasks: surface_dc / surface_ac / floquet ------------------------------

struct SweepPoint {
  double R, theta, E;
};

inline std::vector<SweepPoint> sweep_points(const json& cfg) {
  const json sweep = cfg.value("sweep", json::object());
  const std::vector<double> Rs = sweep_axis(sweep.at("R"));
  const std::vector<double> thetas = sweep.contains("theta")
                                         ? sweep_axis(sweep.at("theta"))
                                         : std::vector<double>{0.0};
  const std::vector<double> Es = sweep_axis(sweep.at("E"));
  std::vector<SweepPoint> pts;
  pts.reserve(Rs.size() * thetas.size() * Es.size());
  for (const double R : Rs)
    for (const double th : thetas)
      for (const double E : Es) pts.push_back({R, th, E});
  return pts;
}

inline TaskOutput run_surface_dc(const ElectronicModel& model, const json& cfg,
                                 int threads) {
  const std::vector<SweepPoint> pts = sweep_points(cfg);
  TaskOutput out;
  out.columns = {"R", "theta", "E_dc", "omega", "energy", "tracked_weight", "M_used"};
  out.rows.resize(pts.size());
  const int g = model.ground_index();
  parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    const DressedSpectrum s = dc_adiabatic_states(model, p.R, p.theta, 0.0, p.E);
    const int col = s.tracking[static_cast<std::size_t>(g)];
    const double weight = s.eigenvectors(g, col) * s.eigenvectors(g, col);
    out.rows[static_cast<std::size_t>(i)] =
        join_csv({fmt17(p.R), fmt17(p.theta), fmt17(p.E), fmt17(0.0),
                  fmt17(s.eigenvalues[col]), fmt17(weight), "0"});
  });
  out.diagnostics["points"] = pts.size();
  return out;
}

inline TaskOutput run_surface_ac(const ElectronicModel& model, const json& cfg,
                                 int threads) {
  const FieldSpec field = field_from_json(cfg.at("field"));
  const json num = cfg.value("numerics", json::object());
  const int M0 = num.value("fourier_cutoff", 8);
  const bool autoM = num.value("fourier_auto", true);
  const std::vector<SweepPoint> pts = sweep_points(cfg);

  TaskOutput out;
  out.columns = {"R", "theta", "E_amp", "omega", "quasienergy", "tracked_weight",
                 "M_used"};
  out.rows.resize(pts.size());
  std::vector<int> m_used(pts.size(), M0);
  parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    FloquetResult r;
    int M = M0;
    if (autoM) {
      FloquetAutoResult ar = quasienergies_auto(model, p.R, p.theta, p.E, field.omega, M0);
      r = std::move(ar.result);
      M = ar.M_used;
    } else {
      r = quasienergies(model, p.R, p.theta, p.E, field.omega, M0);
    }
    m_used[static_cast<std::size_t>(i)] = M;
    out.rows[static_cast<std::size_t>(i)] =
        join_csv({fmt17(p.R), fmt17(p.theta), fmt17(p.E), fmt17(field.omega),
                  fmt17(r.tracked_quasienergy), fmt17(r.tracked_weight),
                  std::to_string(M)});
  });
  int mmax = 0;
  for (const int m : m_used) mmax = std::max(mmax, m);
  out.diagnostics["M_used_max"] = mmax;
  out.diagnostics["points"] = pts.size();
  return out;
}

inline TaskOutput run_floquet(const ElectronicModel& model, const json& cfg,
                              int threads) {
  const FieldSpec field = field_from_json(cfg.at("field"));
  const json num = cfg.value("numerics", json::object());
  const int M0 = num.value("fourier_cutoff", 8);
  const bool autoM = num.value("fourier_auto", true);
  const std::vector<SweepPoint> pts = sweep_points(cfg);

  TaskOutput out;
  out.columns = {"R",     "theta",       "E_amp",          "omega",
                 "state", "quasienergy", "tracked_weight", "M_used"};
  std::vector<std::string> blocks(pts.size());
  std::vector<int> m_used(pts.size(), M0);
  parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    FloquetResult r;
    int M = M0;
    if (autoM) {
      FloquetAutoResult ar = quasienergies_auto(model, p.R, p.theta, p.E, field.omega, M0);
      r = std::move(ar.result);
      M = ar.M_used;
    } else {
      r = quasienergies(model, p.R, p.theta, p.E, field.omega, M0);
    }
    m_used[static_cast<std::size_t>(i)] = M;
    std::string block;
    const int row0 = (r.fourier_cutoff) * r.n_states;
    for (int n = 0; n < r.n_states; ++n) {
      const int col = r.tracking[static_cast<std::size_t>(n)];
      const double w = r.eigenvectors(row0 + n, col) * r.eigenvectors(row0 + n, col);
      block += join_csv({fmt17(p.R), fmt17(p.theta), fmt17(p.E), fmt17(field.omega),
                         std::to_string(n), fmt17(r.raw_eigenvalues[col]), fmt17(w),
                         std::to_string(M)});
      block += '\n';
    }
    blocks[static_cast<std::size_t>(i)] = std::move(block);
  });
  for (auto& b : blocks) {
    std::istringstream ss(b);
    std::string line;
    while (std::getline(ss, line)) out.rows.push_back(line);
  }
  int mmax = 0;
  for (const int m : m_used) mmax = std::max(mmax, m);
  out.diagnostics["M_used_max"] = mmax;
  out.diagnostics["points"] = pts.size();
  return out;
}

// ---- tasks: align / orient -------------------------------------------------

inline TaskOutput run_alignment(const ElectronicModel& model, const json& cfg,
                                bool dc_task) {
  const FieldSpec field = field_from_json(cfg.at("field"));
  const json num = cfg.value("numerics", json::object());
  const json tj = cfg.at("time");
  const Limit limit = dc_task ? Limit::dc : Limit::ac;
  const double resonance_tol = num.value("resonance_tol", default_resonance_tol);

  BuildOptions opts;
  opts.basis = RotorBasis(num.value("j_max", 40), num.value("m", 0));
  const bool rovib = num.value("mode", "rotor") == std::string("rovib");
  if (num.contains("R_fix")) opts.R_fix = num.at("R_fix").get<double>();

  const int g = model.ground_index();
  const double alpha_omega = limit == Limit::ac ? field.omega : 0.0;

  PolarizabilityCurve curve;
  if (rovib) {
    const auto& rj = num.at("radial");
    opts.radial = RadialGrid(rj.at("R_min").get<double>(), rj.at("R_max").get<double>(),
                             rj.at("n").get<int>());
    const Eigen::VectorXd R = opts.radial->points();
    curve = sample_polarizability(model, g,
                                  std::vector<double>(R.data(), R.data() + R.size()),
                                  alpha_omega,
                                  Gauge::length, resonance_tol);
  } else {
    const std::optional<double> R0 =
        opts.R_fix ? opts.R_fix : model.equilibrium_radius();
    if (!R0) throw ConfigError("numerics.R_fix required for rotor mode");
    curve = sample_polarizability(model, g, {*R0}, alpha_omega, Gauge::length,
                                  resonance_tol);
  }

  const EffectiveHamiltonian H = build_effective(
      model, curve, field, rovib ? Mode::rovib : Mode::rotor, limit, opts);

  Wavepacket psi;
  const int j0 = num.value("initial_j", 0);
  if (rovib) {
    const VibrationalResult vib = vibrational_eigenstates(model, *opts.radial, 1, false);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(opts.radial->n, opts.basis.size());
    if (j0 < std::abs(opts.basis.m) || j0 > opts.basis.j_max)
      throw ConfigError("numerics.initial_j outside the rotor basis");
    c.col(j0 - std::abs(opts.basis.m)) =
        vib.wavefunctions.col(0).cast<std::complex<double>>();
    psi = Wavepacket::rovib(opts.basis, *opts.radial, c);
  } else {
    psi = Wavepacket::rotor_state(opts.basis, j0);
  }

  TaskOutput out;
  out.columns = {"t", "cos2_exp", "cos_exp", "norm", "energy_exp"};
  for (int i = 0; i < opts.basis.size(); ++i)
    out.columns.push_back("pop_j" + std::to_string(opts.basis.j_of(i)));

  double norm_drift = 0.0;
  const auto observer = [&](const Wavepacket& p) {
    std::vector<std::string> cells = {
        fmt17(p.time), fmt17(expectation(p, Observable::cos2_theta)),
        fmt17(expectation(p, Observable::cos_theta)), fmt17(p.norm()),
        fmt17(energy_expectation(p, H, p.time))};
    const Eigen::VectorXd pops = j_populations(p);
    for (Eigen::Index i = 0; i < pops.size(); ++i) cells.push_back(fmt17(pops[i]));
    out.rows.push_back(join_csv(cells));
    norm_drift = std::max(norm_drift, std::abs(p.norm() - 1.0));
  };

  PropagateOptions popts;
  popts.sample_every = tj.value("sample_every", 1);
  popts.observer = observer;
  const double t0 = tj.value("t0", 0.0);
  psi = propagate(psi, H, t0, tj.at("t1").get<double>(), tj.at("dt").get<double>(),
                  popts);

  out.diagnostics["norm_drift_max"] = norm_drift;
  out.diagnostics["j_max_used"] = opts.basis.j_max;
  if (!rovib && limit == Limit::ac)
    // drive period vs rotational revival time, the adiabaticity diagnostic
    out.diagnostics["omega_T_rot"] = field.omega * M_PI / H.B;
  const Eigen::VectorXd pops = j_populations(psi);
  out.diagnostics["top_two_j_pop"] =
      pops[pops.size() - 1] + pops[pops.size() - 2];
  out.final_state = std::move(psi);
  return out;
}

// ---- task: vib --------------------------------------------------------------

inline TaskOutput run_vib(const ElectronicModel& model, const json& cfg) {
  const json num = cfg.value("numerics", json::object());
  const auto& rj = num.at("radial");
  const RadialGrid grid(rj.at("R_min").get<double>(), rj.at("R_max").get<double>(),
                        rj.at("n").get<int>());
  const VibrationalResult res =
      vibrational_eigenstates(model, grid, num.value("n_levels", 3));

  TaskOutput out;
  out.columns = {"v", "energy"};
  for (Eigen::Index v = 0; v < res.energies.size(); ++v)
    out.rows.push_back(join_csv({std::to_string(v), fmt17(res.energies[v])}));
  out.warnings = res.warnings;
  out.diagnostics["grid_n"] = grid.n;
  return out;
}

// ---- task: trap ---------------------------------------------------------------

inline TaskOutput run_trap(const ElectronicModel& model, const json& cfg) {
  const FieldSpec field = field_from_json(cfg.at("field"));
  const json num = cfg.value("numerics", json::object());
  const auto& cj = num.at("com");
  const SineGrid grid(cj.at("x_min").get<double>(), cj.at("x_max").get<double>(),
                      cj.at("n").get<int>());
  Wavepacket psi = Wavepacket::com_gaussian(grid, cj.value("x0", 0.0),
                                            cj.at("sigma2").get<double>(),
                                            cj.value("k", 0.0));
  const json tj = cfg.at("time");
  const ComTrajectory traj = com_trap_dynamics(
      model, cj.at("alpha_bar").get<double>(), field, std::move(psi),
      tj.value("t0", 0.0), tj.at("t1").get<double>(), tj.at("dt").get<double>(),
      tj.value("sample_every", 1));

  TaskOutput out;
  out.columns = {"t", "X_mean", "X2_mean", "norm"};
  for (std::size_t k = 0; k < traj.t.size(); ++k)
    out.rows.push_back(join_csv({fmt17(traj.t[k]), fmt17(traj.x_mean[k]),
                                 fmt17(traj.x2_mean[k]), fmt17(traj.norm[k])}));
  out.warnings = traj.warnings;
  double drift = 0.0;
  for (const double n : traj.norm) drift = std::max(drift, std::abs(n - 1.0));
  out.diagnostics["norm_drift_max"] = drift;
  out.final_state = traj.final_state;
  return out;
}

// ---- task: gauge_compare -------------------------------------------------------

inline TaskOutput run_gauge_compare(const ElectronicModel& model, const json& cfg,
                                    int threads) {
  const json sweep = cfg.value("sweep", json::object());
  const std::vector<double> Rs = sweep_axis(sweep.at("R"));
  const std::vector<double> omegas = sweep_axis(sweep.at("omega"));
  const json num = cfg.value("numerics", json::object());
  const int n_max = num.value("n_max", model.num_states() - 1);
  const double tol = num.value("resonance_tol", default_resonance_tol);

  TaskOutput out;
  out.columns = {"R",           "omega",         "n_prime",    "omega_gn",
                 "dipole_sq",   "length_term",   "momentum_term",
                 "difference",  "closed_form"};
  const int npts = static_cast<int>(Rs.size() * omegas.size());
  std::vector<std::string> blocks(static_cast<std::size_t>(npts));
  std::vector<json> reports(static_cast<std::size_t>(npts));
  parallel_for(npts, threads, [&](int idx) {
    const double R = Rs[static_cast<std::size_t>(idx) % Rs.size()];
    const double w = omegas[static_cast<std::size_t>(idx) / Rs.size()];
    const GaugeReport rep =
        gauge_discrepancy_report(model, model.ground_index(), R, w, n_max, tol);
    std::string block;
    json jterms = json::array();
    for (const auto& t : rep.terms) {
      block += join_csv({fmt17(R), fmt17(w), std::to_string(t.state),
                         fmt17(t.omega_gn), fmt17(t.dipole_sq), fmt17(t.length_term),
                         fmt17(t.momentum_term), fmt17(t.difference),
                         fmt17(t.closed_form)});
      block += '\n';
      jterms.push_back({{"state", t.state},
                        {"omega_gn", t.omega_gn},
                        {"dipole_sq", t.dipole_sq},
                        {"length_term", t.length_term},
                        {"momentum_term", t.momentum_term},
                        {"difference", t.difference},
                        {"closed_form", t.closed_form}});
    }
    blocks[static_cast<std::size_t>(idx)] = std::move(block);
    reports[static_cast<std::size_t>(idx)] = {
        {"R", rep.R},
        {"omega", rep.omega},
        {"ground", rep.ground},
        {"n_max", rep.n_max},
        {"terms", jterms},
        {"summed_difference", rep.summed_difference},
        {"trk_sum", rep.trk_sum},
        {"ponderomotive_constant", rep.ponderomotive_constant}};
  });
  for (auto& b : blocks) {
    std::istringstream ss(b);
    std::string line;
    while (std::getline(ss, line)) out.rows.push_back(line);
  }
  out.extra_json = json::array();
  for (auto& r : reports) out.extra_json.push_back(std::move(r));
  out.warnings.push_back(
      "momentum-gauge sums on a truncated basis are unreliable; the report "
      "quantifies the truncation, it does not repair it");
  out.diagnostics["n_max"] = n_max;
  return out;
}

} // namespace detail

// --------------------------------------------------------------------------
// run / validate drivers

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> messages;
};

inline RunOutcome run_scenario(const json& cfg, std::string out_prefix, int threads = 1,
                               const std::string& cli_task = "") {
  RunOutcome outcome;
  const auto violations = validate_scenario(cfg, cli_task);
  if (!violations.empty()) {
    outcome.exit_code = 2;
    outcome.messages = violations;
    return outcome;
  }
  const std::string task = cfg.value("task", cli_task);
  if (out_prefix.empty())
    out_prefix = cfg.value("output", json::object()).value("prefix", "diatom_out");

  const auto t_start = std::chrono::steady_clock::now();
  detail::TaskOutput result;
  try {
    const auto model = resolve_model(cfg);
    if (task == "polarizability")
      result = detail::run_polarizability(*model, cfg, threads);
    else if (task == "surface_dc")
      result = detail::run_surface_dc(*model, cfg, threads);
    else if (task == "surface_ac")
      result = detail::run_surface_ac(*model, cfg, threads);
    else if (task == "floquet")
      result = detail::run_floquet(*model, cfg, threads);
    else if (task == "align")
      result = detail::run_alignment(*model, cfg, false);
    else if (task == "orient")
      result = detail::run_alignment(*model, cfg, true);
    else if (task == "vib")
      result = detail::run_vib(*model, cfg);
    else if (task == "trap")
      result = detail::run_trap(*model, cfg);
    else if (task == "gauge_compare")
      result = detail::run_gauge_compare(*model, cfg, threads);
  } catch (const IoError& e) {
    outcome.exit_code = 4;
    outcome.messages.push_back(e.what());
    return outcome;
  } catch (const ConfigError& e) {
    outcome.exit_code = 2;
    outcome.messages.push_back(e.what());
    return outcome;
  } catch (const Error& e) {
    outcome.exit_code = 3;
    outcome.messages.push_back(e.what());
    return outcome;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  try {
    const std::filesystem::path prefix(out_prefix);
    if (prefix.has_parent_path())
      std::filesystem::create_directories(prefix.parent_path());

    const std::string csv_path = out_prefix + ".csv";
    {
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) throw IoError("cannot write " + csv_path);
      csv << detail::join_csv(result.columns) << '\n';
      for (const auto& row : result.rows) csv << row << '\n';
      if (!csv) throw IoError("short write on " + csv_path);
    }

    std::vector<std::string> outputs = {csv_path};
    if (!result.extra_json.is_null() && !result.extra_json.empty()) {
      const std::string jpath = out_prefix + ".gauge.json";
      std::ofstream jf(jpath, std::ios::binary);
      if (!jf) throw IoError("cannot write " + jpath);
      jf << result.extra_json.dump(2) << '\n';
      outputs.push_back(jpath);
    }
    if (result.final_state &&
        cfg.value("output", json::object()).value("checkpoint", false)) {
      const std::string wpath = out_prefix + ".wavepacket.bin";
      save_checkpoint(*result.final_state, wpath);
      outputs.push_back(wpath);
    }

    json manifest;
    manifest["tool"] = "diatom";
    manifest["version"] = version;
    manifest["task"] = task;
    manifest["config_hash"] = "fnv1a:" + fnv1a_hex(cfg.dump());
    manifest["wall_time_s"] = wall;
    manifest["threads"] = threads;
    manifest["diagnostics"] = result.diagnostics;
    manifest["warnings"] = result.warnings;
    manifest["outputs"] = outputs;
    const std::string mpath = out_prefix + ".manifest.json";
    std::ofstream mf(mpath, std::ios::binary);
    if (!mf) throw IoError("cannot write " + mpath);
    mf << manifest.dump(2) << '\n';
  } catch (const IoError& e) {
    outcome.exit_code = 4;
    outcome.messages.push_back(e.what());
    return outcome;
  } catch (const std::filesystem::filesystem_error& e) {
    outcome.exit_code = 4;
    outcome.messages.push_back(e.what());
    return outcome;
  }

  for (const auto& w : result.warnings) outcome.messages.push_back("warning: " + w);
  return outcome;
}

} // namespace diatom

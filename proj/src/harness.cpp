#include "shockshift/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "shockshift/inequalities.hpp"

namespace shockshift {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Termination t) {
  switch (t) {
    case Termination::HorizonReached: return "HorizonReached";
    case Termination::CFLError: return "CFLError";
    case Termination::FoldOver: return "FoldOver";
    case Termination::Diverged: return "Diverged";
    case Termination::MNonConvergence: return "MNonConvergence";
    case Termination::Singular: return "Singular";
  }
  return "?";
}

Termination termination_from(FailureKind kind) {
  switch (kind) {
    case FailureKind::CFLError: return Termination::CFLError;
    case FailureKind::FoldOver: return Termination::FoldOver;
    case FailureKind::Diverged: return Termination::Diverged;
    case FailureKind::MNonConvergence: return Termination::MNonConvergence;
    case FailureKind::Singular: return Termination::Singular;
  }
  return Termination::Diverged;
}

ShockProfile build_profile(const ExperimentConfig& cfg, const FluxField& flux) {
  // The table stops by itself once the tails are within 1e-13 of the end states.
  const double x1_max = std::max(200.0, cfg.grid.L.value_or(0.0) + 20.0);
  return solve_profile(flux, cfg.u_minus, cfg.u_plus, x1_max, cfg.profile_dx);
}

namespace {

// Unnormalized perturbation shape; `envelope` localizes in x1 for the general modes.
ScalarField family_member(const PerturbationSpec& p, const Grid& grid, bool envelope) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double k = p.wavenumber;
  auto env = [&](double x1) {
    const double z = (x1 - p.center) / p.width;
    return std::exp(-0.5 * z * z);
  };
  if (p.family == "gaussian_bump") {
    return sample(grid, [&](double x1, double x2, double) {
      return env(x1) * (1.0 + p.modulation * std::cos(two_pi * k * x2));
    });
  }
  if (p.family == "transverse_sine") {
    return sample(grid, [&](double x1, double x2, double) {
      return (envelope ? env(x1) : 1.0) * std::sin(two_pi * k * x2);
    });
  }
  // Band-limited noise: random tensor modes with wavenumbers <= 4.
  struct Mode {
    double a, k1, p1, k2, p2, k3, p3;
  };
  std::vector<Mode> modes;
  std::uint64_t ctr = 0;
  auto uni = [&](double a, double b) { return a + (b - a) * counter_uniform(p.seed, 0x6e6f697365ull, ctr++); };
  for (int q = 0; q < 12; ++q) {
    Mode m{};
    m.a = uni(-1.0, 1.0);
    m.k1 = std::numbers::pi * std::floor(uni(0.0, 4.999)) / grid.L;
    m.p1 = uni(0.0, two_pi);
    m.k2 = two_pi * std::floor(uni(0.0, 4.999));
    m.p2 = uni(0.0, two_pi);
    m.k3 = grid.dim == 3 ? two_pi * std::floor(uni(0.0, 4.999)) : 0.0;
    m.p3 = uni(0.0, two_pi);
    modes.push_back(m);
  }
  return sample(grid, [&](double x1, double x2, double x3) {
    double s = 0.0;
    for (const auto& m : modes) s += m.a * std::cos(m.k1 * x1 + m.p1) * std::cos(m.k2 * x2 + m.p2) * std::cos(m.k3 * x3 + m.p3);
    return (envelope ? env(x1) : 1.0) * s;
  });
}

}  // namespace

InitialData make_initial_data(const ExperimentConfig& cfg, const ShockProfile& profile, const Grid& grid) {
  InitialData d;
  const double a = cfg.perturbation.amplitude;
  const auto U = sample(grid, [&](double x1, double, double) { return profile.value(x1); });
  d.Y0 = ScalarField(grid);
  if (cfg.mode != ShiftMode::Special) {
    d.u0 = U;
    if (a > 0.0) {
      const auto p = family_member(cfg.perturbation, grid, true);
      const double norm = std::sqrt(integrate(p * p));
      if (!(norm > 0.0)) throw ConfigError("invalid perturbation: family member vanishes on the grid");
      for (std::size_t k = 0; k < p.size(); ++k) d.u0[k] += a * p[k] / norm;
    }
  } else {
    if (a > 0.0) {
      const auto p = family_member(cfg.perturbation, grid, false);
      const double sup = sup_norm(p);
      if (!(sup > 0.0)) throw ConfigError("invalid perturbation: family member vanishes on the grid");
      for (std::size_t k = 0; k < p.size(); ++k) d.Y0[k] = a * p[k] / sup;
      const auto d1 = gradient(d.Y0).comp[0];
      double stretch = 1.0;
      for (std::size_t k = 0; k < d1.size(); ++k) stretch = std::min(stretch, 1.0 + d1[k]);
      if (!(stretch > 0.1)) {
        throw ConfigError("invalid perturbation.amplitude: initial shift folds over (min 1 + d1 Y0 = " +
                          std::to_string(stretch) + ")");
      }
    }
    d.u0 = compose_V(profile, d.Y0);
  }
  const auto diff = d.u0 - U;
  d.l2_distance = std::sqrt(integrate(diff * diff));
  d.sup_Y0 = sup_norm(d.Y0);
  return d;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json certificate_json(const ProfileCertificate& c) {
  return {{"pass", c.pass},
          {"rh_residual", c.rh_residual},
          {"lax_pass", c.lax_pass},
          {"normalization_error", c.normalization_error},
          {"monotonicity_violations", c.monotonicity_violations},
          {"peak_violations", c.peak_violations},
          {"tail_slope_minus", c.tail_slope_minus},
          {"tail_slope_plus", c.tail_slope_plus},
          {"tail_error_minus", c.tail_error_minus},
          {"tail_error_plus", c.tail_error_plus},
          {"uprime_residual", c.uprime_residual}};
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  json j;
  j["config"] = dump_config(m.config);
  j["resolved"] = {{"L", m.L},
                   {"mode", to_string(m.config.mode)},
                   {"flux", m.config.flux.kind},
                   {"n1", m.config.grid.n1},
                   {"n_perp", m.config.grid.n_perp},
                   {"N", m.config.grid.N},
                   {"amplitude", m.config.perturbation.amplitude},
                   {"seed", m.config.perturbation.seed}};
  j["profile_certificate"] = certificate_json(m.certificate);
  j["wall_seconds"] = m.wall_seconds;
  j["termination"] = to_string(m.termination);
  j["message"] = m.message;
  j["t_final"] = m.t_final;
  j["steps"] = m.steps;
  j["initial_l2_distance"] = m.initial_distance;
  j["sup_u0"] = m.sup_u0;
  j["max_u_excess"] = m.max_u_excess;
  j["max_Y_increase"] = m.max_Y_increase;
  j["min_stretch"] = m.min_stretch;
  j["h_clipped_steps"] = m.h_clipped_steps;
  j["files"] = m.files;
  return j.dump(2) + "\n";
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto wall0 = std::chrono::steady_clock::now();
  RunResult res;
  auto& man = res.manifest;
  man.config = cfg;

  const auto flux = cfg.flux.build(cfg.grid.N);
  auto profile = build_profile(cfg, flux);
  man.certificate = check_profile(profile);
  man.L = resolved_L(cfg, profile);
  const auto grid = Grid::make(cfg.grid.N, man.L, cfg.grid.n1, cfg.grid.n_perp);
  ModelOptions mo;
  mo.backend = cfg.backend == "serial" ? kernels::Backend::Serial : kernels::Backend::OpenMP;
  mo.balance_profile = cfg.balance_profile;
  mo.cfl_safety = cfg.cfl_safety;
  const Model model(flux, std::move(profile), grid, cfg.mode, cfg.shift, mo);

  auto init = make_initial_data(cfg, model.profile(), grid);
  man.initial_distance = init.l2_distance;
  man.sup_u0 = sup_norm(init.u0);

  std::ofstream csv, extrema;
  const fs::path out = cfg.output_dir;
  if (opts.write_files) {
    fs::create_directories(out);
    csv.open(out / "diagnostics.csv", std::ios::binary);
    extrema.open(out / "extrema.csv", std::ios::binary);
    if (!csv || !extrema) throw std::runtime_error("cannot write into '" + out.string() + "'");
    write_csv_header(csv);
    extrema << "t,sup_abs_u,sup_abs_Y,min_stretch\n";
    csv.flush();
    man.files = {(out / "diagnostics.csv").string(), (out / "extrema.csv").string()};
  }

  auto record = [&](const SimState& s, double residual) {
    auto r = diagnostics(s, model);
    r.entropy_residual = residual;
    res.series.push_back(r);
    if (!opts.write_files) return;
    write_csv_row(csv, r);
    csv.flush();
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.t, sup_norm(s.u), sup_norm(s.Y), s.min_stretch);
    extrema << buf;
    extrema.flush();
  };
  int snap_index = 0;
  auto snapshot = [&](const SimState& s) {
    if (!opts.write_files || !(cfg.snapshot_interval > 0.0)) return;
    if (s.t + 1e-12 < snap_index * cfg.snapshot_interval && s.t < cfg.T * (1 - 1e-12)) return;
    fs::create_directories(out / "snapshots");
    char name[64];
    std::snprintf(name, sizeof name, "%04d", snap_index);
    const auto pu = (out / "snapshots" / (std::string("u_") + name + ".bin")).string();
    const auto pY = (out / "snapshots" / (std::string("Y_") + name + ".bin")).string();
    write_snapshot(pu, s.u, "u", s.t);
    write_snapshot(pY, s.Y, "Y", s.t);
    man.files.push_back(pu);
    man.files.push_back(pY);
    while (snap_index * cfg.snapshot_interval <= s.t + 1e-12) ++snap_index;
  };

  Stepper stepper(model);
  SimState s = make_state(model, std::move(init.u0), std::move(init.Y0));
  const double T = cfg.T;
  try {
    stepper.refresh(s);
    man.min_stretch = s.min_stretch;
    record(s, 0.0);
    snapshot(s);
    double supY = sup_norm(s.Y);
    while (s.t < T * (1.0 - 1e-13)) {
      double dt = cfg.dt ? *cfg.dt : cfl_dt(s, model);
      dt = std::min(dt, T - s.t);
      const bool diag = ((man.steps + 1) % cfg.diag_stride == 0) || s.t + dt >= T * (1.0 - 1e-13);
      IdentityTerms before;
      if (diag) before = identity_terms(s, model);
      stepper.advance(s, dt);
      ++man.steps;
      man.t_final = s.t;
      man.max_u_excess = std::max(man.max_u_excess, sup_norm(s.u) - man.sup_u0);
      const double supY_next = sup_norm(s.Y);
      man.max_Y_increase = std::max(man.max_Y_increase, supY_next - supY);
      supY = supY_next;
      man.min_stretch = std::min(man.min_stretch, s.min_stretch);
      if (s.h_clipped) ++man.h_clipped_steps;
      if (opts.on_step) opts.on_step(s, model, dt);
      if (diag) record(s, entropy_identity_residual(before, identity_terms(s, model), dt));
      snapshot(s);
    }
    man.termination = Termination::HorizonReached;
  } catch (const SimulationError& e) {
    man.termination = termination_from(e.kind());
    man.message = e.what();
  }

  man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  if (opts.write_files) {
    const auto mpath = out / "manifest.json";
    const auto rpath = out / "report.txt";
    man.files.push_back(mpath.string());
    man.files.push_back(rpath.string());
    std::ofstream(mpath) << manifest_json(man);
    emit_report(man, res.series, rpath.string());
  }
  return res;
}

std::vector<PropertyLine> evaluate_properties(const RunManifest& m, const std::vector<DiagnosticsRecord>& rows) {
  std::vector<PropertyLine> out;
  const bool special = m.config.mode == ShiftMode::Special;
  const bool no_ramp = m.config.mode == ShiftMode::GeneralNoRamp;
  const std::string energy_name =
      special ? "weighted energy monotone" : (no_ramp ? "contraction for all t" : "contraction after t0");
  const char* names[] = {"", "integrated balance", "f_gap trend", "max principle"};
  if (m.termination != Termination::HorizonReached || rows.size() < 2) {
    const std::string why = "run ended by " + to_string(m.termination) + " at t = " + fmt("%.6g", m.t_final);
    out.push_back({energy_name, "NOT-EVALUATED", why});
    for (int k = 1; k < 4; ++k) out.push_back({names[k], "NOT-EVALUATED", why});
    return out;
  }
  auto status = [](bool ok) { return std::string(ok ? "PASS" : "FAIL"); };

  // Monotonicity: E (general: after t0, or from t = 0 without the ramp) or W_Y (special); tolerance from the measured residual.
  {
    double worst = -std::numeric_limits<double>::infinity();
    bool ok = true;
    const double scale0 = special ? rows.front().W_Y : rows.front().E;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      const auto& a = rows[k];
      const auto& b = rows[k + 1];
      if (!special && !no_ramp && a.t <= m.config.shift.t0) continue;
      const double dtk = b.t - a.t;
      const double tol = special ? 1e-10 * scale0
                                 : 10.0 * std::max(a.entropy_residual, b.entropy_residual) * dtk;
      const double inc = special ? b.W_Y - a.W_Y : b.E - a.E;
      worst = std::max(worst, inc - tol);
      ok = ok && inc <= tol;
    }
    out.push_back({energy_name, status(ok), "max(increase - tolerance) = " + fmt("%.3e", std::max(worst, 0.0))});
  }
  // E(T)/2 + int (D_grad + D_proj) <= 1.05 E(0)/2, trapezoid over the diagnostic rows.
  {
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      integral += 0.5 * (rows[k].D_grad + rows[k].D_proj + rows[k + 1].D_grad + rows[k + 1].D_proj) *
                  (rows[k + 1].t - rows[k].t);
    }
    const double lhs = 0.5 * rows.back().E + integral, rhs = 0.5 * rows.front().E * 1.05;
    out.push_back({names[1], status(lhs <= rhs), "lhs = " + fmt("%.6e", lhs) + ", bound = " + fmt("%.6e", rhs)});
  }
  // Tail average of f_gap over the last quarter vs half the first-quarter average.
  {
    const double T = rows.back().t;
    double a = 0, na = 0, b = 0, nb = 0;
    for (const auto& r : rows) {
      if (r.t <= 0.25 * T) a += r.f_gap, ++na;
      if (r.t >= 0.75 * T) b += r.f_gap, ++nb;
    }
    a = na ? a / na : 0.0;
    b = nb ? b / nb : 0.0;
    out.push_back({names[2], status(b <= 0.5 * a || (a == 0.0 && b == 0.0)),
                   "last-quarter mean = " + fmt("%.6e", b) + ", first-quarter mean = " + fmt("%.6e", a)});
  }
  {
    bool ok = m.max_u_excess <= 1e-8;
    std::string detail = "max(sup|u| - sup|u0|) = " + fmt("%.3e", m.max_u_excess);
    if (special) {
      ok = ok && m.max_Y_increase <= 1e-10;
      detail += ", max per-step increase of sup|Y| = " + fmt("%.3e", m.max_Y_increase);
    }
    out.push_back({names[3], status(ok), detail});
  }
  return out;
}

void emit_report(const RunManifest& m, const std::vector<DiagnosticsRecord>& rows, const std::string& path) {
  std::ostringstream s;
  s << "mode: " << to_string(m.config.mode) << "  flux: " << m.config.flux.kind
    << "  amplitude: " << m.config.perturbation.amplitude << "\n";
  s << "grid: N=" << m.config.grid.N << " L=" << m.L << " n1=" << m.config.grid.n1 << " n_perp=" << m.config.grid.n_perp
    << "\n";
  s << "termination: " << to_string(m.termination) << " at t = " << m.t_final << " after " << m.steps << " steps";
  if (!m.message.empty()) s << " (" << m.message << ")";
  s << "\n";
  s << "profile certificate: " << (m.certificate.pass ? "PASS" : "FAIL") << "\n";
  s << "||u0 - U||_L2 = " << m.initial_distance << "\n";
  for (const auto& p : evaluate_properties(m, rows)) s << p.name << ": " << p.status << "  [" << p.detail << "]\n";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write report to '" + path + "'");
  f << s.str();
  if (!f) throw std::runtime_error("error while writing report to '" + path + "'");
}

std::vector<RunResult> sweep(const ExperimentConfig& base) {
  const int n = static_cast<int>(base.sweep_amplitudes.size());
  std::vector<RunResult> results(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1) num_threads(base.sweep_workers)
  for (int k = 0; k < n; ++k) {
    auto cfg = base;
    cfg.perturbation.amplitude = base.sweep_amplitudes[std::size_t(k)];
    cfg.output_dir = (fs::path(base.output_dir) / ("amp_" + std::to_string(k))).string();
    try {
      results[std::size_t(k)] = run_experiment(cfg);
    } catch (const std::exception& e) {
      errors[std::size_t(k)] = e.what();
    }
  }
  for (int k = 0; k < n; ++k) {
    if (!errors[std::size_t(k)].empty()) {
      throw std::runtime_error("sweep member " + std::to_string(k) + " failed: " + errors[std::size_t(k)]);
    }
  }
  if (!base.output_dir.empty()) {
    fs::create_directories(base.output_dir);
    std::ofstream f(fs::path(base.output_dir) / "sweep.csv");
    f << "amplitude,termination,t_final,E0,E_T,dir\n";
    for (int k = 0; k < n; ++k) {
      const auto& r = results[std::size_t(k)];
      f << base.sweep_amplitudes[std::size_t(k)] << "," << to_string(r.manifest.termination) << ","
        << r.manifest.t_final << "," << (r.series.empty() ? 0.0 : r.series.front().E) << ","
        << (r.series.empty() ? 0.0 : r.series.back().E) << "," << r.manifest.config.output_dir << "\n";
    }
  }
  return results;
}

}  // namespace shockshift

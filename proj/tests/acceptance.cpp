// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails. Runtimes are reported next to their budgets.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shockshift/harness.hpp"
#include "shockshift/inequalities.hpp"

namespace fs = std::filesystem;
using namespace shockshift;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Ctx {
  fs::path presets, out;
  // runs shared between criteria, keyed by preset name
  std::map<std::string, RunResult> runs;
};

ExperimentConfig preset(const Ctx& c, const std::string& name, std::vector<std::string> pins) {
  pins.push_back("output.dir=" + (c.out / name).string());
  return load_config((c.presets / (name + ".yaml")).string(), pins);
}

bool property_pass(const RunResult& r, const std::string& name, std::string* detail = nullptr) {
  for (const auto& p : evaluate_properties(r.manifest, r.series)) {
    if (p.name != name) continue;
    if (detail) *detail = p.status + " [" + p.detail + "]";
    return p.status == "PASS";
  }
  if (detail) *detail = "property '" + name + "' missing";
  return false;
}

std::string ended(const RunResult& r) {
  return to_string(r.manifest.termination) + " at t = " + fmt("%.4g", r.manifest.t_final);
}

// --- 1: profile -------------------------------------------------------------
Outcome profile_correctness(Ctx&) {
  ExperimentConfig cfg;  // Burgers (1, -1), profile_dx 0.005
  const auto p = build_profile(cfg, cfg.flux.build(2));
  double err = 0.0;
  const auto xs = p.x1_nodes();
  for (std::size_t k = 0; k < xs.size(); ++k) err = std::max(err, std::abs(p.u_values()[k] + std::tanh(xs[k] / 2.0)));
  // between the nodes as well
  for (double x = -30.0; x <= 30.0; x += 0.0037) err = std::max(err, std::abs(p.value(x) + std::tanh(x / 2.0)));
  const auto c = check_profile(p);
  const double tail = std::max(std::abs(c.tail_slope_minus - 1.0), std::abs(c.tail_slope_plus - 1.0));
  const bool ok = err <= 1e-8 && c.rh_residual <= 1e-10 && c.uprime_residual <= 1e-3 && tail <= 0.02;
  return {ok, "sup|U + tanh(x/2)| = " + fmt("%.2e", err) + ", R-H " + fmt("%.1e", c.rh_residual) +
                  ", U' residual " + fmt("%.2e", c.uprime_residual) + ", tail rates " +
                  fmt("%.4f", c.tail_slope_minus) + "/" + fmt("%.4f", c.tail_slope_plus)};
}

// --- 2: steady state --------------------------------------------------------
Outcome steady_state(Ctx& c) {
  const auto cfg = preset(c, "steady", {"mode=general", "perturbation.amplitude=0", "run.T=5", "grid.n1=401",
                                        "grid.n_perp=64"});
  double du = std::numeric_limits<double>::quiet_NaN(), supY = du;
  RunOptions opts;
  opts.on_step = [&](const SimState& s, const Model& m, double) {
    if (s.t < cfg.T * (1.0 - 1e-13)) return;
    du = sup_abs_diff(s.u, m.profile_field());
    supY = sup_norm(s.Y);
  };
  auto r = run_experiment(cfg, opts);
  const bool ok = r.manifest.termination == Termination::HorizonReached && du <= 1e-4 && supY <= 1e-10;
  std::string d = ended(r) + ", sup|u - U| = " + fmt("%.2e", du) + ", sup|Y| = " + fmt("%.2e", supY);
  c.runs["steady"] = std::move(r);
  return {ok, d};
}

// --- 4, 6, 8 share one run ---------------------------------------------------
struct MTrack {
  std::vector<double> t, m, rhs;
  std::string error;
};
MTrack g_mtrack;

Outcome contraction(Ctx& c) {
  const auto cfg = preset(c, "general_bump",
                          {"mode=general", "flux.kind=burgers", "perturbation.family=gaussian_bump",
                           "perturbation.amplitude=0.01", "shift.t0=1", "shift.M=10", "run.T=10", "grid.n1=401",
                           "grid.n_perp=64", "grid.N=2"});
  auto& mt = g_mtrack;
  mt = {};
  RunOptions opts;
  opts.on_step = [&](const SimState& s, const Model& m, double) {
    if (mt.t.empty()) {  // the initial state is not passed to the hook; m(0) = 0 by construction
      mt.t.push_back(0.0);
      mt.m.push_back(0.0);
      mt.rhs.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    mt.t.push_back(s.t);
    mt.m.push_back(s.m);
    try {
      mt.rhs.push_back(m_ode_rhs(s, m));
    } catch (const std::exception& e) {
      if (mt.error.empty()) mt.error = e.what();
      mt.rhs.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  };
  auto r = run_experiment(cfg, opts);
  const auto& rows = r.series;
  std::string mono;
  bool ok = property_pass(r, "contraction after t0", &mono);
  double E_t0 = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    if (row.t >= cfg.shift.t0) {
      E_t0 = row.E;
      break;
    }
  }
  const double E_T = rows.empty() ? E_t0 : rows.back().E;
  ok = ok && r.manifest.termination == Termination::HorizonReached && E_T < E_t0;
  std::string d = ended(r) + "; monotone after t0: " + mono + "; E(t0) = " + fmt("%.6e", E_t0) +
                  ", E(T) = " + fmt("%.6e", E_T) + ", " + std::to_string(rows.size()) + " diagnostic rows";
  c.runs["general_bump"] = std::move(r);
  return {ok, d};
}

Outcome integrated_balance(Ctx& c) {
  const auto it = c.runs.find("general_bump");
  if (it == c.runs.end()) return {false, "criterion-4 run missing"};
  const auto& rows = it->second.series;
  std::string d;
  const bool ok = property_pass(it->second, "integrated balance", &d);
  // where the budget is spent: before and after the ramp has switched on
  double before = 0.0, after = 0.0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double piece = 0.5 * (rows[k].D_grad + rows[k].D_proj + rows[k + 1].D_grad + rows[k + 1].D_proj) *
                         (rows[k + 1].t - rows[k].t);
    (rows[k + 1].t <= it->second.manifest.config.shift.t0 ? before : after) += piece;
  }
  double Emax = 0.0;
  for (const auto& r : rows) Emax = std::max(Emax, r.E);
  d += "; dissipation on [0, t0] = " + fmt("%.4e", before) + ", after = " + fmt("%.4e", after) +
       ", E(0) = " + fmt("%.4e", rows.empty() ? 0.0 : rows.front().E) + ", max E = " + fmt("%.4e", Emax);
  return {ok, d};
}

Outcome m_consistency(Ctx&) {
  const auto& mt = g_mtrack;
  if (mt.t.size() < 3) return {false, "criterion-4 run recorded no steps"};
  double worst = 0.0, at = 0.0;
  for (std::size_t n = 1; n + 1 < mt.t.size(); ++n) {
    const double cd = (mt.m[n + 1] - mt.m[n - 1]) / (mt.t[n + 1] - mt.t[n - 1]);
    const double e = std::abs(cd - mt.rhs[n]);
    if (!(e <= worst)) {
      worst = e;
      at = mt.t[n];
      if (std::isnan(e)) break;
    }
  }
  std::string d = "max |centered dm/dt - m_ode_rhs| = " + fmt("%.3e", worst) + " at t = " + fmt("%.4g", at) + " over " +
                  std::to_string(mt.t.size() - 2) + " steps";
  if (!mt.error.empty()) d += "; " + mt.error;
  return {worst <= 1e-4 && mt.error.empty(), d};
}

// --- 3: maximum principles over every preset ------------------------------------
Outcome max_principles(Ctx& c) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(c.presets)) {
    if (e.path().extension() == ".yaml") names.insert(e.path().stem().string());
  }
  bool ok = !names.empty();
  std::ostringstream d;
  auto judge = [&](const std::string& label, const RunResult& r) {
    const bool special = r.manifest.config.mode == ShiftMode::Special;
    bool good = r.manifest.termination == Termination::HorizonReached && r.manifest.max_u_excess <= 1e-8;
    if (special) good = good && r.manifest.max_Y_increase <= 1e-10;
    ok = ok && good;
    d << label << (good ? " ok" : " VIOLATED") << " (" << fmt("%.1e", r.manifest.max_u_excess);
    if (special) d << ", dY " << fmt("%.1e", r.manifest.max_Y_increase);
    if (r.manifest.termination != Termination::HorizonReached) d << ", " << ended(r);
    d << "); ";
  };
  for (const auto& name : names) {
    const auto cfg = preset(c, name, {});
    if (name == "sweep") {
      const auto all = sweep(cfg);
      for (std::size_t k = 0; k < all.size(); ++k) judge("sweep[" + fmt("%g", cfg.sweep_amplitudes[k]) + "]", all[k]);
      continue;
    }
    auto it = c.runs.find(name);
    if (it == c.runs.end() || dump_config(it->second.manifest.config) != dump_config(cfg)) {
      it = c.runs.insert_or_assign(name, run_experiment(cfg)).first;
    }
    judge(name, it->second);
  }
  return {ok, d.str()};
}

// --- 5: refinement study ------------------------------------------------------
// Four levels, dx and dt halved together. The order is judged on the finest three,
// which bracket the production spacing (dx1 = 0.1, dx_perp = 1/64); the fit over the
// coarsest three is reported alongside.
Outcome refinement(Ctx&) {
  // GeneralNoRamp (phi = 1 throughout) so w, h and g are active from the first step.
  constexpr int levels = 4;
  const int n1[levels] = {81, 161, 321, 641}, np[levels] = {8, 16, 32, 64};
  const double L = 10.0, T = 0.25, t_from = 0.05;
  ExperimentConfig cfg;
  cfg.perturbation.amplitude = 1e-2;
  cfg.mode = ShiftMode::GeneralNoRamp;
  const auto flux = cfg.flux.build(2);
  const auto profile = build_profile(cfg, flux);
  // the finest level sits at its CFL limit, so every level is stable
  const double speed = 1.0 + 2.0 * cfg.perturbation.amplitude;
  const double dt_fine = cfl_dt(Grid::make(2, L, n1[levels - 1], np[levels - 1]), speed, 0.4);
  double er[levels], vr[levels];
  std::ostringstream d;
  for (int lvl = 0; lvl < levels; ++lvl) {
    const auto grid = Grid::make(2, L, n1[lvl], np[lvl]);
    const Model M(flux, profile, grid, cfg.mode, cfg.shift);
    auto init = make_initial_data(cfg, profile, grid);
    auto s = make_state(M, std::move(init.u0), std::move(init.Y0));
    Stepper st(M);
    st.refresh(s);
    const double dt = dt_fine * double(1 << (levels - 1 - lvl));
    const int steps = int(std::lround(T / dt));
    er[lvl] = vr[lvl] = 0.0;
    for (int k = 0; k < steps; ++k) {
      const bool measure = s.t + dt >= t_from;
      SimState prev;
      IdentityTerms a;
      if (measure) {
        prev = s;
        a = identity_terms(prev, M);
      }
      st.advance(s, dt);
      if (!measure) continue;
      er[lvl] = std::max(er[lvl], entropy_identity_residual(a, identity_terms(s, M), dt));
      vr[lvl] = std::max(vr[lvl], residual_V(prev, s, M, dt));
    }
    d << n1[lvl] << "x" << np[lvl] << " dt " << fmt("%.2e", dt) << ": entropy " << fmt("%.3e", er[lvl]) << ", V "
      << fmt("%.3e", vr[lvl]) << "; ";
  }
  // least-squares slope of -log2(residual) against the level; with three equally
  // spaced levels the middle point drops out
  auto order = [](const double* r) { return (std::log2(r[0]) - std::log2(r[2])) / 2.0; };
  const double oe = order(er + 1), ov = order(vr + 1);
  bool dec = true;
  for (int l = 2; l < levels; ++l) dec = dec && er[l] < er[l - 1] && vr[l] < vr[l - 1];
  d << "orders on the finest three: entropy " << fmt("%.2f", oe) << ", V " << fmt("%.2f", ov)
    << " (coarsest three: " << fmt("%.2f", order(er)) << ", " << fmt("%.2f", order(vr)) << ")";
  return {dec && oe >= 1.0 && ov >= 1.0, d.str()};
}

// --- 7: special mode ------------------------------------------------------------
Outcome special_mode(Ctx& c) {
  const auto cfg = preset(c, "special_sine", {"mode=special", "perturbation.family=transverse_sine",
                                              "perturbation.amplitude=0.05", "perturbation.wavenumber=1", "run.T=5",
                                              "grid.n1=401", "grid.n_perp=64"});
  double rep = 0.0;
  RunOptions opts;
  opts.on_step = [&](const SimState& s, const Model&, double) { rep = std::max(rep, sup_abs_diff(s.u, s.V)); };
  auto r = run_experiment(cfg, opts);
  std::string mono;
  const bool a = property_pass(r, "weighted energy monotone", &mono);
  const double f0 = r.series.empty() ? 0.0 : r.series.front().f_gap;
  const double fT = r.series.empty() ? 0.0 : r.series.back().f_gap;
  const bool b = fT <= 0.1 * f0;
  const bool cc = rep <= 5e-3;
  std::string d = ended(r) + "; (a) " + mono + "; (b) f_gap(T)/f_gap(0) = " + fmt("%.3e", f0 > 0 ? fT / f0 : 0.0) +
                  "; (c) sup|u - U(x1 + Y)| = " + fmt("%.3e", rep);
  const bool done = r.manifest.termination == Termination::HorizonReached;
  c.runs["special_sine"] = std::move(r);
  return {done && a && b && cc, d};
}

// --- 9: inequality suites -------------------------------------------------------
Outcome inequalities(Ctx&) {
  ExperimentConfig cfg;
  const auto profile = build_profile(cfg, cfg.flux.build(2));
  const auto grid = Grid::make(2, resolved_L(cfg, profile), cfg.grid.n1, cfg.grid.n_perp);
  SamplerConfig sc;
  sc.n_samples = 200;
  bool ok = true;
  std::ostringstream d;
  const std::function<double(double)> w = [&profile](double x) { return std::abs(profile.slope(x)); };
  for (auto id : {LemmaId::Poincare22, LemmaId::Pointwise23}) {
    const auto rep = estimate_constant(id, sc, profile, grid);
    double drift = 0.0;
    for (int s = 0; s < sc.n_samples; ++s) {
      const auto f = inequality_sample(grid, sc.seed, s, sc.max_wavenumber);
      const auto f2 = 2.0 * f;
      const double r1 = id == LemmaId::Poincare22 ? check_poincare(f, w, w, sc.m).ratio
                                                  : check_pointwise(f, profile, sc.m).ratio;
      const double r2 = id == LemmaId::Poincare22 ? check_poincare(f2, w, w, sc.m).ratio
                                                  : check_pointwise(f2, profile, sc.m).ratio;
      drift = std::max(drift, std::abs(r2 - r1) / std::max(std::abs(r1), 1e-300));
    }
    const bool good = rep.pass && std::isfinite(rep.worst_ratio) && rep.violations == 0 && drift <= 1e-10;
    ok = ok && good;
    d << to_string(id) << ": worst " << fmt("%.4g", rep.worst_ratio) << " (sample " << rep.worst_sample_id << "), "
      << rep.violations << " violations, f->2f drift " << fmt("%.1e", drift) << "; ";
  }
  return {ok, d.str()};
}

// --- 10: Picard ------------------------------------------------------------------
Outcome picard(Ctx&) {
  ExperimentConfig cfg;
  cfg.perturbation.amplitude = 1e-2;
  cfg.grid.n1 = 201;
  cfg.grid.n_perp = 32;
  const auto flux = cfg.flux.build(2);
  const auto profile = build_profile(cfg, flux);
  const auto grid = Grid::make(2, resolved_L(cfg, profile), cfg.grid.n1, cfg.grid.n_perp);
  const Model M(flux, profile, grid, cfg.mode, cfg.shift);
  const auto init = make_initial_data(cfg, profile, grid);
  const double horizon = 0.5 * cfg.shift.t0;
  const double dt = cfl_dt(grid, 1.0 + 2.0 * cfg.perturbation.amplitude, 0.4);
  const auto r = picard_solve_Y(M, init.u0, horizon, 6, dt);

  bool geo = r.successive_diffs.size() == 6;
  double worst_ratio = 0.0;
  for (std::size_t k = 2; k < r.successive_diffs.size(); ++k) {
    const double q = r.successive_diffs[k - 1] > 0.0 ? r.successive_diffs[k] / r.successive_diffs[k - 1] : 0.0;
    worst_ratio = std::max(worst_ratio, q);
    geo = geo && q <= 0.7;
  }
  auto s = make_state(M, init.u0, init.Y0);
  Stepper st(M);
  st.refresh(s);
  double err = 0.0;
  for (std::size_t k = 1; k < r.times.size(); ++k) {
    st.advance(s, r.times[k] - r.times[k - 1]);
    const auto diff = s.Y - r.trajectory[k];
    err = std::max(err, std::sqrt(integrate(diff * diff)));
  }
  std::ostringstream d;
  d << "differences";
  for (double v : r.successive_diffs) d << " " << fmt("%.2e", v);
  d << "; worst ratio after iterate 2 = " << fmt("%.3f", worst_ratio) << "; L_inf(L2) vs stepper = "
    << fmt("%.2e", err) << " (sup|Y| = " << fmt("%.2e", sup_norm(s.Y)) << ")";
  return {geo && !r.non_contraction && err <= 5e-3, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-10"};
  std::string presets = "presets", out = "acceptance_out";
  std::vector<int> only;
  bool report = false;
  app.add_option("--presets", presets, "directory with the shipped preset configs");
  app.add_option("--out", out, "where run outputs go");
  app.add_option("--only", only, "run just these criteria (4, 6 and 8 share one run)");
  app.add_flag("--report", report, "exit 0 once every criterion has been evaluated, whatever the verdicts");
  CLI11_PARSE(app, argc, argv);

  Ctx c{presets, out, {}};
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*fn)(Ctx&);
  };
  // 4 runs before 6 and 8 (they read its series), and 2/4/7 before 3 (which reuses those runs).
  const std::vector<Criterion> all = {
      {1, "profile correctness", 1, profile_correctness},
      {2, "steady-state preservation", 120, steady_state},
      {4, "contraction after t0", 600, contraction},
      {6, "integrated balance", 0, integrated_balance},
      {8, "m consistency", 0, m_consistency},
      {7, "special mode", 300, special_mode},
      {3, "discrete maximum principles", 0, max_principles},
      {5, "identity residual refinement", 1200, refinement},
      {9, "inequality suites", 60, inequalities},
      {10, "Picard iteration", 0, picard},
  };
  auto wanted = [&](int id) {
    if (only.empty()) return true;
    std::set<int> w(only.begin(), only.end());
    if (w.count(6) || w.count(8)) w.insert(4);
    return w.count(id) > 0;
  };

  std::map<int, std::string> lines;
  bool all_pass = true;
  for (const auto& cr : all) {
    if (!wanted(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.fn(c);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.1f s", secs);
    if (cr.budget_s > 0) timing += secs <= cr.budget_s ? fmt(" (budget %g s)", cr.budget_s)
                                                       : fmt(" (OVER budget %g s)", cr.budget_s);
    std::string line = "criterion " + std::to_string(cr.id) + " " + cr.name + ": " + (o.pass ? "PASS" : "FAIL") +
                       "  [" + o.detail + "]  " + timing;
    std::cout << line << std::endl;
    lines[cr.id] = line;
    all_pass = all_pass && o.pass;
  }
  std::cout << "\nsummary\n";
  for (const auto& [id, line] : lines) std::cout << line.substr(0, line.find("  [")) << "\n";
  std::cout << (all_pass ? "all criteria PASS" : "some criteria FAIL") << "\n";
  return all_pass || report ? 0 : 1;
}

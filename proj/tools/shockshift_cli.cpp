// Command-line front end: profile | run | special | verify | sweep.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "shockshift/harness.hpp"
#include "shockshift/inequalities.hpp"

namespace fs = std::filesystem;
using namespace shockshift;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "YAML experiment config (defaults apply when omitted)");
  app->add_option("--set", c.sets, "override a config key, e.g. --set grid.n1=201")->take_all();
}

ExperimentConfig load(const Common& c, std::vector<std::string> extra = {}) {
  extra.insert(extra.begin(), c.sets.begin(), c.sets.end());
  return c.config.empty() ? parse_config("", extra, "<defaults>") : load_config(c.config, extra);
}

nlohmann::json report_json(const InequalityReport& r, const SamplerConfig& s) {
  return {{"lemma", to_string(r.lemma)},     {"n_samples", r.n_samples},
          {"seed", s.seed},                  {"m", s.m},
          {"worst_ratio", r.worst_ratio},    {"worst_sample_id", r.worst_sample_id},
          {"violations", r.violations},      {"pass", r.pass},
          {"truncation_moment", r.truncation_moment}};
}

int do_run(const ExperimentConfig& cfg) {
  const auto res = run_experiment(cfg);
  for (const auto& p : evaluate_properties(res.manifest, res.series)) {
    std::cout << p.name << ": " << p.status << "  [" << p.detail << "]\n";
  }
  std::cout << "termination: " << to_string(res.manifest.termination) << " at t = " << res.manifest.t_final
            << "; outputs in " << cfg.output_dir << "\n";
  return res.manifest.termination == Termination::HorizonReached ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous planar shocks, the shift equation and L2 contraction diagnostics"};
  app.require_subcommand(1);

  Common pc, rc, sc, vc, wc;
  std::string profile_out = "profile.csv";
  auto* prof = app.add_subcommand("profile", "tabulate the shock profile (CSV) and print its certificate (JSON)");
  add_common(prof, pc);
  prof->add_option("-o,--output", profile_out, "CSV path for x1,U,dU");

  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run, rc);
  auto* special = app.add_subcommand("special", "run one experiment with the special perturbation u0 = U(x1 + Y0)");
  add_common(special, sc);

  std::string lemma = "both", csv_path;
  SamplerConfig samp;
  auto* verify = app.add_subcommand("verify", "estimate the weighted inequality constants over seeded samples");
  add_common(verify, vc);
  verify->add_option("--lemma", lemma, "poincare | pointwise | both")->check(CLI::IsMember({"poincare", "pointwise", "both"}));
  verify->add_option("-n,--samples", samp.n_samples, "samples per lemma")->check(CLI::PositiveNumber);
  verify->add_option("--seed", samp.seed, "sampler seed");
  verify->add_option("--m", samp.m, "shift of the weights");
  verify->add_option("--csv", csv_path, "per-sample ratios CSV");

  auto* sw = app.add_subcommand("sweep", "fan out one run per amplitude in sweep.amplitudes");
  add_common(sw, wc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prof) {
      const auto cfg = load(pc);
      const auto flux = cfg.flux.build(cfg.grid.N);
      const auto p = build_profile(cfg, flux);
      std::ofstream f(profile_out);
      if (!f) throw std::runtime_error("cannot write '" + profile_out + "'");
      f << "x1,U,dU\n";
      const auto xs = p.x1_nodes();
      char buf[96];
      for (std::size_t k = 0; k < xs.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", xs[k], p.u_values()[k], p.du_values()[k]);
        f << buf;
      }
      const auto c = check_profile(p);
      nlohmann::json j{{"u_minus", p.u_minus()},        {"u_plus", p.u_plus()},
                       {"u_star", p.u_star()},          {"decay_minus", p.decay_minus()},
                       {"decay_plus", p.decay_plus()},  {"nodes", p.size()},
                       {"pass", c.pass},                {"rh_residual", c.rh_residual},
                       {"lax_pass", c.lax_pass},        {"normalization_error", c.normalization_error},
                       {"monotonicity_violations", c.monotonicity_violations},
                       {"peak_violations", c.peak_violations},
                       {"tail_slope_minus", c.tail_slope_minus},
                       {"tail_slope_plus", c.tail_slope_plus},
                       {"uprime_residual", c.uprime_residual}};
      std::cout << j.dump(2) << "\n";
      return c.pass ? 0 : 2;
    }
    if (*run) return do_run(load(rc));
    if (*special) return do_run(load(sc, {"mode=special"}));
    if (*verify) {
      const auto cfg = load(vc);
      const auto flux = cfg.flux.build(cfg.grid.N);
      const auto p = build_profile(cfg, flux);
      const auto grid = Grid::make(cfg.grid.N, resolved_L(cfg, p), cfg.grid.n1, cfg.grid.n_perp);
      std::vector<LemmaId> ids;
      if (lemma != "pointwise") ids.push_back(LemmaId::Poincare22);
      if (lemma != "poincare") ids.push_back(LemmaId::Pointwise23);
      nlohmann::json out = nlohmann::json::array();
      std::ofstream csv;
      if (!csv_path.empty()) {
        csv.open(csv_path);
        if (!csv) throw std::runtime_error("cannot write '" + csv_path + "'");
        csv << "lemma,sample,kind,ratio\n";
      }
      bool ok = true;
      for (auto id : ids) {
        const auto r = estimate_constant(id, samp, p, grid);
        ok = ok && r.pass;
        out.push_back(report_json(r, samp));
        if (csv) {
          for (int s = 0; s < r.n_samples; ++s) {
            csv << to_string(id) << "," << s << "," << r.sample_kind[std::size_t(s)] << ","
                << r.ratios[std::size_t(s)] << "\n";
          }
        }
      }
      std::cout << out.dump(2) << "\n";
      return ok ? 0 : 2;
    }
    if (*sw) {
      const auto results = sweep(load(wc));
      for (const auto& r : results) {
        std::cout << "amplitude " << r.manifest.config.perturbation.amplitude << ": "
                  << to_string(r.manifest.termination) << " at t = " << r.manifest.t_final << " ("
                  << r.manifest.config.output_dir << ")\n";
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shockshift/config.hpp"
#include "shockshift/functionals.hpp"

namespace shockshift {

enum class Termination { HorizonReached, CFLError, FoldOver, Diverged, MNonConvergence, Singular };
std::string to_string(Termination t);
Termination termination_from(FailureKind kind);

struct InitialData {
  ScalarField u0, Y0;
  double l2_distance = 0.0;  // ||u0 - U||_L2 on the grid
  double sup_Y0 = 0.0;
};

/// General modes: u0 = U + amplitude * p / ||p||_L2, Y0 = 0.
/// Special mode: Y0 = amplitude * p / sup|p|, u0 = U(x1 + Y0).
/// Throws ConfigError when the Special data already folds over.
InitialData make_initial_data(const ExperimentConfig& cfg, const ShockProfile& profile, const Grid& grid);

/// Builds the profile used by every run (table wide enough for the box).
ShockProfile build_profile(const ExperimentConfig& cfg, const FluxField& flux);

struct RunManifest {
  ExperimentConfig config;
  double L = 0.0;
  ProfileCertificate certificate;
  double wall_seconds = 0.0;
  Termination termination = Termination::HorizonReached;
  std::string message;
  double t_final = 0.0;  // last accepted time
  long steps = 0;
  double initial_distance = 0.0;
  double sup_u0 = 0.0;
  double max_u_excess = 0.0;    // max_t sup|u(t)| - sup|u0|
  double max_Y_increase = 0.0;  // max over steps of sup|Y_{n+1}| - sup|Y_n|
  double min_stretch = 1.0;     // min over steps of min(1 + d1 Y)
  int h_clipped_steps = 0;
  std::vector<std::string> files;
};

struct RunOptions {
  bool write_files = true;
  /// Called after every accepted step with the fresh state and the step used.
  std::function<void(const SimState&, const Model&, double dt)> on_step;
};

struct RunResult {
  RunManifest manifest;
  std::vector<DiagnosticsRecord> series;
};

/// Profile -> initial data -> coupled stepping to T. Stepper failures end the
/// run and set the termination reason; everything written so far stays valid.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct PropertyLine {
  std::string name;
  std::string status;  // PASS | FAIL | NOT-EVALUATED
  std::string detail;
};
std::vector<PropertyLine> evaluate_properties(const RunManifest& manifest, const std::vector<DiagnosticsRecord>& series);
/// Writes the human-readable report; throws std::runtime_error naming the path on I/O failure.
void emit_report(const RunManifest& manifest, const std::vector<DiagnosticsRecord>& series, const std::string& path);
std::string manifest_json(const RunManifest& manifest);

/// One run per amplitude, each in <output_dir>/amp_<k>, spread over cfg.sweep_workers.
std::vector<RunResult> sweep(const ExperimentConfig& cfg);

}  // namespace shockshift

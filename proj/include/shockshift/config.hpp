#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shockshift/dynamics.hpp"

namespace shockshift {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flux block:
///   flux:
///     kind: burgers | cubic_convex | custom
///     a1: [c0, c1, c2, ...]          # custom only; A_1 = sum c_k u^k
///     transverse: [[c0, c1, ...], ...] # optional, one list per transverse component (default A_i = u)
struct FluxSpec {
  std::string kind = "burgers";
  std::vector<double> a1;
  std::vector<std::vector<double>> transverse;

  FluxField build(int n_components) const;
};

struct GridSpec {
  std::optional<double> L;  // default: max(20, 20 / min decay rate)
  int n1 = 401;
  int n_perp = 64;
  int N = 2;
};

/// Perturbation families: gaussian_bump, transverse_sine, noise.
/// General modes: u0 = U + amplitude * p / ||p||_L2.  Special: Y0 = amplitude * p / sup|p|.
struct PerturbationSpec {
  std::string family = "gaussian_bump";
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  double center = 0.0;      // x1 centre of the bump / envelope
  double width = 1.0;       // x1 standard deviation
  int wavenumber = 1;       // transverse wavenumber (sine and bump modulation)
  double modulation = 0.5;  // transverse modulation depth of the bump
};

struct ExperimentConfig {
  FluxSpec flux;
  double u_minus = 1.0;
  double u_plus = -1.0;
  GridSpec grid;
  ShiftMode mode = ShiftMode::General;
  ShiftParams shift;
  PerturbationSpec perturbation;
  double T = 10.0;
  std::optional<double> dt;  // fixed step; default is the per-step CFL value
  double cfl_safety = 0.4;
  int diag_stride = 10;
  double snapshot_interval = 0.0;  // 0 disables snapshots
  bool balance_profile = true;
  std::string backend = "omp";  // omp | serial
  double profile_dx = 0.005;
  std::string output_dir = "out";
  std::vector<double> sweep_amplitudes{1e-3, 1e-2, 1e-1};
  int sweep_workers = 1;

  void validate() const;  // throws ConfigError naming the field
};

/// Documented keys, dotted (e.g. "grid.n1"), in schema order.
const std::vector<std::string>& config_keys();

/// `overrides` are "dotted.key=value" strings applied before validation; the
/// value is read as a YAML scalar or flow sequence.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                              const std::string& source = "<string>");

/// Resolved box half-length for a given profile.
double resolved_L(const ExperimentConfig& cfg, const ShockProfile& profile);

/// The resolved configuration as YAML text (round-trips through parse_config).
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace shockshift

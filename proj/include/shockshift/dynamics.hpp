#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shockshift/flux.hpp"
#include "shockshift/grid.hpp"
#include "shockshift/kernels.hpp"
#include "shockshift/profile.hpp"

namespace shockshift {

enum class ShiftMode { General, GeneralNoRamp, Special };
enum class RampShape { SmoothStep, Identity };

std::string to_string(ShiftMode mode);
ShiftMode shift_mode_from_string(const std::string& s);

struct ShiftParams {
  double M = 10.0;
  double t0 = 1.0;
  RampShape phi_shape = RampShape::SmoothStep;

  void validate() const;  // M >= 5, t0 > 0
};

/// 1 - s^3 (10 - 15 s + 6 s^2) on [0, 1], clamped outside.
double smooth_step_down(double s) noexcept;
/// Cutoff around the shock layer: 1 for |x1| <= M, 0 for |x1| >= M + 1.
double psi_M(const ShiftParams& params, double x1) noexcept;
/// Time ramp: 0 on [0, t0/2], 1 on [t0, inf); identically 1 for RampShape::Identity.
double phi_ramp(const ShiftParams& params, double t) noexcept;

enum class FailureKind { CFLError, FoldOver, Diverged, MNonConvergence, Singular };
std::string to_string(FailureKind kind);

class SimulationError : public std::runtime_error {
 public:
  SimulationError(FailureKind kind, double t, const std::string& what)
      : std::runtime_error(what), kind_(kind), t_(t) {}
  FailureKind kind() const noexcept { return kind_; }
  double time() const noexcept { return t_; }

 private:
  FailureKind kind_;
  double t_;
};

struct ModelOptions {
  kernels::Backend backend = kernels::Backend::OpenMP;
  /// Subtract the discrete residual of the sampled profile from the u right side,
  /// making u = U an exact discrete steady state.
  bool balance_profile = true;
  double cfl_safety = 0.4;
};

/// Immutable problem data shared by every stage of a run.
class Model {
 public:
  Model(FluxField flux, ShockProfile profile, Grid grid, ShiftMode mode, ShiftParams params,
        ModelOptions options = {});

  const FluxField& flux() const noexcept { return flux_; }
  const ShockProfile& profile() const noexcept { return profile_; }
  const Grid& grid() const noexcept { return grid_; }
  ShiftMode mode() const noexcept { return mode_; }
  const ShiftParams& params() const noexcept { return params_; }
  const ModelOptions& options() const noexcept { return options_; }
  const kernels::FluxTables& tables() const noexcept { return tables_; }
  const kernels::KernelSet& kernels() const noexcept { return kernels::kernel_set(options_.backend); }
  kernels::UProblem u_problem() const noexcept;

  /// phi(t) for the general modes; Special mode has no w at all.
  double phi(double t) const noexcept;
  bool has_sources() const noexcept { return mode_ != ShiftMode::Special; }
  /// U at the grid nodes (constant across transverse slices).
  const ScalarField& profile_field() const noexcept { return profile_field_; }
  /// |U'(x1 + m)| at each x1 node.
  std::vector<double> weight_rows(double m) const;
  /// psi_M(x1 + m) at each x1 node.
  std::vector<double> psi_rows(double m) const;

 private:
  FluxField flux_;
  ShockProfile profile_;
  Grid grid_;
  ShiftMode mode_;
  ShiftParams params_;
  ModelOptions options_;
  kernels::FluxTables tables_;
  ScalarField profile_field_;
  std::vector<double> balance_;
  double ghost_left_ = 0.0, ghost_right_ = 0.0;
};

/// Solution fields plus the caches every right side is built from. `fresh`
/// means the caches were computed from the current (t, u, Y).
struct SimState {
  double t = 0.0;
  ScalarField u, Y;
  double m = 0.0;

  ScalarField V;
  VectorField w;
  double h = 0.0, g = 0.0;
  bool h_clipped = false;
  ScalarField ku, kY;  // right sides at this state
  double max_speed = 0.0;
  double min_stretch = 1.0;
  int m_iterations = 0;
  bool fresh = false;
};

SimState make_state(const Model& model, ScalarField u0, ScalarField Y0, double t = 0.0);

ScalarField compose_V(const ShockProfile& profile, const ScalarField& Y);
VectorField compute_w(const SimState& state, const Model& model);

struct HmResult {
  double value = 0.0;
  bool clipped = false;
};
/// Windowed average of w_1 over |x1 + m| <= M + 1, divided by 2(M + 1).
/// Throws SimulationError(Singular) when the window misses the grid entirely.
HmResult compute_hM(const SimState& state, const ShiftParams& params, const Grid& grid);
double compute_g(const SimState& state, const ShockProfile& profile, const Grid& grid);

/// Integral over [a, b] (clipped to [-L, L]) of the piecewise-linear interpolant of row values.
double integrate_rows_window(const Grid& grid, const std::vector<double>& rows, double a, double b);

struct MUpdate {
  double m = 0.0;
  int iterations = 0;
  double residual = 0.0;
};
/// Solves m = int |U'(x1 + m)| Y / int |U'(x1 + m)| by damped fixed-point iteration.
MUpdate update_m(const ScalarField& Y, double m_guess, const ShockProfile& profile);
/// The same, starting from precomputed transverse row integrals of Y.
MUpdate update_m_rows(const Grid& grid, const std::vector<double>& y_rows, double m_guess,
                      const ShockProfile& profile, double t = 0.0);

/// m'(t) from the ODE form: int |U'(x1+m)| Y_t / int |U'(x1+m)| (1 + d1 Y). Needs fresh caches.
double m_ode_rhs(const SimState& state, const Model& model);

/// 0.4 * min(1 / (2 sum_k dx_k^-2), dx_min / max_speed).
double cfl_dt(const Grid& grid, double max_speed, double safety = 0.4);
double cfl_dt(const SimState& state, const Model& model);

/// Owns the stage workspace of the coupled Heun scheme.
class Stepper {
 public:
  explicit Stepper(const Model& model) : model_(model) {}

  /// Recomputes every cache of `s` at its (t, u, Y), starting update_m from s.m.
  void refresh(SimState& s) const;
  /// One Heun step of the coupled system. Throws SimulationError; `s` is
  /// left untouched when the step is rejected.
  void advance(SimState& s, double dt);

  /// One Heun step of the u equation alone.
  ScalarField step_u(const SimState& s, double dt);
  /// One Heun step of the Y equation with u frozen at s.u (or u_next at the
  /// second stage when given); returns (Y, m) at t + dt.
  std::pair<ScalarField, double> step_Y(const SimState& s, double dt, const ScalarField* u_next = nullptr);

 private:
  void check(const SimState& s) const;

  const Model& model_;
  SimState stage_;
};

struct PicardResult {
  std::vector<double> times;
  std::vector<ScalarField> trajectory;   // final iterate at every step
  std::vector<double> successive_diffs;  // sup_t ||Y_{n+1} - Y_n||_L2, n = 0..n_iters-1
  bool non_contraction = false;
};

/// Picard iteration for the linearised shift equation over [0, horizon],
/// coefficients frozen from the previous iterate, Y_0 = 0. The u trajectory is
/// computed once with the same Heun scheme and step.
PicardResult picard_solve_Y(const Model& model, const ScalarField& u0, double horizon, int n_iters, double dt);

}  // namespace shockshift

#include "shockshift/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace shockshift {

std::string to_string(ShiftMode mode) {
  switch (mode) {
    case ShiftMode::General: return "general";
    case ShiftMode::GeneralNoRamp: return "general_no_ramp";
    case ShiftMode::Special: return "special";
  }
  return "unknown";
}

ShiftMode shift_mode_from_string(const std::string& s) {
  if (s == "general") return ShiftMode::General;
  if (s == "general_no_ramp") return ShiftMode::GeneralNoRamp;
  if (s == "special") return ShiftMode::Special;
  throw std::invalid_argument("unknown mode '" + s + "' (expected general, general_no_ramp or special)");
}

std::string to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::CFLError: return "CFLError";
    case FailureKind::FoldOver: return "FoldOver";
    case FailureKind::Diverged: return "Diverged";
    case FailureKind::MNonConvergence: return "MNonConvergence";
    case FailureKind::Singular: return "Singular";
  }
  return "unknown";
}

void ShiftParams::validate() const {
  if (!(M >= 5.0)) throw std::invalid_argument("shift.M must be >= 5");
  if (!(t0 > 0.0)) throw std::invalid_argument("shift.t0 must be > 0");
}

double smooth_step_down(double s) noexcept {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double psi_M(const ShiftParams& params, double x1) noexcept { return smooth_step_down(std::abs(x1) - params.M); }

double phi_ramp(const ShiftParams& params, double t) noexcept {
  if (params.phi_shape == RampShape::Identity) return 1.0;
  const double half = 0.5 * params.t0;
  return 1.0 - smooth_step_down((t - half) / half);
}

// ---------------------------------------------------------------------------

Model::Model(FluxField flux, ShockProfile profile, Grid grid, ShiftMode mode, ShiftParams params,
             ModelOptions options)
    : flux_(std::move(flux)),
      profile_(std::move(profile)),
      grid_(grid),
      mode_(mode),
      params_(params),
      options_(options),
      tables_(flux_) {
  params_.validate();
  if (flux_.n_components() != grid_.dim) {
    throw std::invalid_argument("model: flux has " + std::to_string(flux_.n_components()) +
                                " components but the grid has N = " + std::to_string(grid_.dim));
  }
  profile_field_ = sample(grid_, [this](double x1, double, double) { return profile_.value(x1); });
  ghost_left_ = profile_.value(-grid_.L - grid_.dx1);
  ghost_right_ = profile_.value(grid_.L + grid_.dx1);
  if (options_.balance_profile) {
    balance_.assign(grid_.size(), 0.0);
    kernels().u_rhs(grid_, tables_, u_problem(), profile_field_.values.data(), balance_.data());
  }
}

kernels::UProblem Model::u_problem() const noexcept {
  return {ghost_left_, ghost_right_, balance_.empty() ? nullptr : balance_.data()};
}

double Model::phi(double t) const noexcept {
  switch (mode_) {
    case ShiftMode::General: return phi_ramp(params_, t);
    case ShiftMode::GeneralNoRamp: return 1.0;
    case ShiftMode::Special: return 0.0;
  }
  return 0.0;
}

std::vector<double> Model::weight_rows(double m) const {
  std::vector<double> w(std::size_t(grid_.n1));
  for (int i = 0; i < grid_.n1; ++i) w[std::size_t(i)] = std::abs(profile_.slope(grid_.x1(i) + m));
  return w;
}

std::vector<double> Model::psi_rows(double m) const {
  std::vector<double> p(std::size_t(grid_.n1));
  for (int i = 0; i < grid_.n1; ++i) p[std::size_t(i)] = psi_M(params_, grid_.x1(i) + m);
  return p;
}

// ---------------------------------------------------------------------------

SimState make_state(const Model& model, ScalarField u0, ScalarField Y0, double t) {
  const Grid& g = model.grid();
  if (!(u0.grid == g) || !(Y0.grid == g)) throw std::invalid_argument("make_state: fields not on the model grid");
  SimState s;
  s.t = t;
  s.u = std::move(u0);
  s.Y = std::move(Y0);
  s.V = ScalarField(g);
  s.w = VectorField(g);
  s.ku = ScalarField(g);
  s.kY = ScalarField(g);
  return s;
}

ScalarField compose_V(const ShockProfile& profile, const ScalarField& Y) {
  const kernels::FluxTables tables(profile.flux());
  ScalarField V(Y.grid);
  kernels::omp::compose_V(Y.grid, profile, tables, Y.values.data(), V.values.data());
  return V;
}

VectorField compute_w(const SimState& state, const Model& model) {
  VectorField w(model.grid());
  std::array<double*, 3> out{};
  for (int c = 0; c < model.grid().dim; ++c) out[c] = w.comp[std::size_t(c)].values.data();
  model.kernels().w_field(model.grid(), model.tables(), model.phi(state.t), state.u.values.data(),
                          state.V.values.data(), out);
  return w;
}

double integrate_rows_window(const Grid& g, const std::vector<double>& rows, double a, double b) {
  a = std::max(a, -g.L);
  b = std::min(b, g.L);
  if (!(b > a)) return 0.0;
  double acc = 0.0;
  for (int i = 0; i + 1 < g.n1; ++i) {
    const double xl = g.x1(i), xr = g.x1(i + 1);
    const double lo = std::max(a, xl), hi = std::min(b, xr);
    if (!(hi > lo)) continue;
    const double s0 = (lo - xl) / g.dx1, s1 = (hi - xl) / g.dx1;
    const double r0 = rows[std::size_t(i)], r1 = rows[std::size_t(i) + 1];
    acc += g.dx1 * (r0 * (s1 - s0) + 0.5 * (r1 - r0) * (s1 * s1 - s0 * s0));
  }
  return acc;
}

HmResult compute_hM(const SimState& s, const ShiftParams& params, const Grid& g) {
  const double a = -s.m - params.M - 1.0, b = -s.m + params.M + 1.0;
  if (b <= -g.L || a >= g.L) {
    throw SimulationError(FailureKind::Singular, s.t, "h_M window lies outside [-L, L]");
  }
  HmResult r;
  r.clipped = a < -g.L || b > g.L;
  const auto rows = row_integrals(s.w.comp[0]);
  r.value = integrate_rows_window(g, rows, a, b) / (2.0 * (params.M + 1.0));
  return r;
}

double compute_g(const SimState& s, const ShockProfile& profile, const Grid& g) {
  const std::size_t S = g.slice();
  std::vector<double> rows(std::size_t(g.n1));
  for (int i = 0; i < g.n1; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < S; ++j) acc += s.u[i * S + j] - s.V[i * S + j];
    rows[std::size_t(i)] = acc * g.cell_perp() * profile.slope(g.x1(i) + s.m);
  }
  return integrate_rows(g, rows);
}

MUpdate update_m_rows(const Grid& g, const std::vector<double>& y_rows, double m_guess, const ShockProfile& profile,
                      double t) {
  auto F = [&](double m) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n1; ++i) {
      const double w = (i == 0 || i == g.n1 - 1 ? 0.5 : 1.0) * std::abs(profile.slope(g.x1(i) + m));
      num += w * y_rows[std::size_t(i)];
      den += w;
    }
    if (!(den > 0.0)) throw SimulationError(FailureKind::Singular, t, "update_m: weight vanishes on the grid");
    return num / den;  // rows already carry the transverse measure 1
  };
  MUpdate r;
  double m = m_guess, relax = 1.0, prev = 0.0;
  for (int it = 1; it <= 50; ++it) {
    const double delta = F(m) - m;
    r.iterations = it;
    r.residual = std::abs(delta);
    if (r.residual < 1e-12) {
      r.m = m + delta;
      return r;
    }
    if (it > 1 && delta * prev < 0.0) relax = 0.5;
    m += relax * delta;
    prev = delta;
  }
  std::ostringstream msg;
  msg << "update_m did not converge in 50 iterations (last |F(m) - m| = " << r.residual << ")";
  throw SimulationError(FailureKind::MNonConvergence, t, msg.str());
}

MUpdate update_m(const ScalarField& Y, double m_guess, const ShockProfile& profile) {
  return update_m_rows(Y.grid, row_integrals(Y), m_guess, profile);
}

double m_ode_rhs(const SimState& s, const Model& model) {
  const Grid& g = model.grid();
  const auto w = model.weight_rows(s.m);
  const auto yt = row_integrals(s.kY);
  const auto y = row_integrals(s.Y);
  double num = 0.0, den = 0.0, mass = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const auto k = std::size_t(i);
    double d1;
    if (i == 0) {
      d1 = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * g.dx1);
    } else if (i == g.n1 - 1) {
      d1 = (3.0 * y[k] - 4.0 * y[k - 1] + y[k - 2]) / (2.0 * g.dx1);
    } else {
      d1 = (y[k + 1] - y[k - 1]) / (2.0 * g.dx1);
    }
    const double tw = (i == 0 || i == g.n1 - 1 ? 0.5 : 1.0) * w[k];
    num += tw * yt[k];
    den += tw * (1.0 + d1);
    mass += tw;
  }
  if (!(std::abs(den) >= 1e-8 * mass)) {
    throw SimulationError(FailureKind::Singular, s.t, "m_ode_rhs: denominator vanishes (d1 Y near -1)");
  }
  return num / den;
}

double cfl_dt(const Grid& g, double max_speed, double safety) {
  const double inv = 1.0 / (g.dx1 * g.dx1) + (g.dim - 1) / (g.dx_perp * g.dx_perp);
  const double diffusive = 1.0 / (2.0 * inv);
  const double advective =
      max_speed > 0.0 ? std::min(g.dx1, g.dx_perp) / max_speed : std::numeric_limits<double>::infinity();
  return safety * std::min(diffusive, advective);
}

double cfl_dt(const SimState& s, const Model& model) {
  return cfl_dt(model.grid(), s.max_speed, model.options().cfl_safety);
}

// ---------------------------------------------------------------------------

void Stepper::refresh(SimState& s) const {
  const Model& M = model_;
  const Grid& g = M.grid();
  const auto& K = M.kernels();
  const auto sv = K.compose_V(g, M.profile(), M.tables(), s.Y.values.data(), s.V.values.data());
  const auto mu = update_m_rows(g, row_integrals(s.Y), s.m, M.profile(), s.t);
  s.m = mu.m;
  s.m_iterations = mu.iterations;

  std::array<double*, 3> wout{};
  std::array<const double*, 3> win{};
  for (int c = 0; c < g.dim; ++c) {
    wout[c] = s.w.comp[std::size_t(c)].values.data();
    win[c] = wout[c];
  }
  kernels::Stats sw;
  if (M.mode() == ShiftMode::Special) {
    for (auto& c : s.w.comp) std::fill(c.values.begin(), c.values.end(), 0.0);
    win = {};
  } else {
    sw = K.w_field(g, M.tables(), M.phi(s.t), s.u.values.data(), s.V.values.data(), wout);
  }
  if (M.has_sources()) {
    const auto hm = compute_hM(s, M.params(), g);
    s.h = hm.value;
    s.h_clipped = hm.clipped;
  } else {
    s.h = 0.0;
    s.h_clipped = false;
  }
  s.g = compute_g(s, M.profile(), g);

  const auto su = K.u_rhs(g, M.tables(), M.u_problem(), s.u.values.data(), s.ku.values.data());
  const auto psi = M.psi_rows(s.m);
  kernels::YTerms terms;
  terms.Y = s.Y.values.data();
  terms.Yc = terms.Y;
  terms.V = s.V.values.data();
  terms.w = win;
  terms.psi_rows = psi.data();
  terms.h = s.h;
  terms.g = s.g;
  terms.sources = M.has_sources();
  const auto sy = K.y_rhs(g, M.tables(), terms, s.kY.values.data());

  s.max_speed = std::max({su.max_speed, sv.max_speed, sw.max_speed});
  s.min_stretch = sy.min_stretch;
  s.fresh = true;
  if (!(su.finite && sv.finite && sw.finite && sy.finite)) {
    throw SimulationError(FailureKind::Diverged, s.t, "non-finite values in the solution");
  }
}

void Stepper::check(const SimState& s) const {
  if (!(s.min_stretch > 0.1)) {
    std::ostringstream msg;
    msg << "shift fold-over: min(1 + d1 Y) = " << s.min_stretch << " <= 0.1";
    throw SimulationError(FailureKind::FoldOver, s.t, msg.str());
  }
}

void Stepper::advance(SimState& s, double dt) {
  if (!s.fresh) {
    refresh(s);
    check(s);
  }
  const double limit = cfl_dt(s, model_);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " violates the CFL limit " << limit;
    throw SimulationError(FailureKind::CFLError, s.t, msg.str());
  }
  if (stage_.u.size() != s.u.size() || !(stage_.u.grid == s.u.grid)) stage_ = s;

  const std::size_t n = s.u.size();
  stage_.t = s.t + dt;
  stage_.m = s.m;
  for (std::size_t k = 0; k < n; ++k) {
    stage_.u[k] = s.u[k] + dt * s.ku[k];
    stage_.Y[k] = s.Y[k] + dt * s.kY[k];
  }
  refresh(stage_);

  for (std::size_t k = 0; k < n; ++k) {
    stage_.u[k] = s.u[k] + 0.5 * dt * (s.ku[k] + stage_.ku[k]);
    stage_.Y[k] = s.Y[k] + 0.5 * dt * (s.kY[k] + stage_.kY[k]);
  }
  stage_.t = s.t + dt;
  stage_.m = s.m;
  refresh(stage_);
  check(stage_);
  std::swap(s, stage_);
}

ScalarField Stepper::step_u(const SimState& s, double dt) {
  const Grid& g = model_.grid();
  const auto& K = model_.kernels();
  const auto prob = model_.u_problem();
  ScalarField k1(g), k2(g), us(g);
  K.u_rhs(g, model_.tables(), prob, s.u.values.data(), k1.values.data());
  for (std::size_t k = 0; k < us.size(); ++k) us[k] = s.u[k] + dt * k1[k];
  K.u_rhs(g, model_.tables(), prob, us.values.data(), k2.values.data());
  for (std::size_t k = 0; k < us.size(); ++k) us[k] = s.u[k] + 0.5 * dt * (k1[k] + k2[k]);
  return us;
}

std::pair<ScalarField, double> Stepper::step_Y(const SimState& s, double dt, const ScalarField* u_next) {
  SimState a = s;
  if (!a.fresh) refresh(a);
  SimState b = a;
  b.t = a.t + dt;
  if (u_next) b.u = *u_next;
  for (std::size_t k = 0; k < b.Y.size(); ++k) b.Y[k] = a.Y[k] + dt * a.kY[k];
  refresh(b);
  ScalarField Y(a.Y.grid);
  for (std::size_t k = 0; k < Y.size(); ++k) Y[k] = a.Y[k] + 0.5 * dt * (a.kY[k] + b.kY[k]);
  const double m = update_m(Y, a.m, model_.profile()).m;
  return {std::move(Y), m};
}

}  // namespace shockshift

#include <cmath>

#include "shockshift/dynamics.hpp"

namespace shockshift {

namespace {

// Coefficients of the linearised shift equation, all taken from one iterate
// at one time level.
struct Frozen {
  SimState s;  // u, Y (= previous iterate), V, w, m, h, g
  std::vector<double> psi;
};

void freeze(const Model& model, Frozen& f, double t, const ScalarField& u, const ScalarField& Yprev, double m_guess) {
  const Grid& g = model.grid();
  const auto& K = model.kernels();
  if (f.s.V.size() != g.size()) f.s = make_state(model, ScalarField(g), ScalarField(g));
  f.s.t = t;
  f.s.u = u;
  f.s.Y = Yprev;
  K.compose_V(g, model.profile(), model.tables(), f.s.Y.values.data(), f.s.V.values.data());
  f.s.m = update_m(f.s.Y, m_guess, model.profile()).m;
  std::array<double*, 3> w{};
  for (int c = 0; c < g.dim; ++c) w[c] = f.s.w.comp[std::size_t(c)].values.data();
  K.w_field(g, model.tables(), model.phi(t), f.s.u.values.data(), f.s.V.values.data(), w);
  f.s.h = compute_hM(f.s, model.params(), g).value;
  f.s.g = compute_g(f.s, model.profile(), g);
  f.psi = model.psi_rows(f.s.m);
}

void linear_rhs(const Model& model, const Frozen& f, const double* Y, double* out) {
  kernels::YTerms t;
  t.Y = Y;
  t.Yc = f.s.Y.values.data();
  t.V = f.s.V.values.data();
  for (int c = 0; c < model.grid().dim; ++c) t.w[c] = f.s.w.comp[std::size_t(c)].values.data();
  t.psi_rows = f.psi.data();
  t.h = f.s.h;
  t.g = f.s.g;
  t.sources = true;
  model.kernels().y_rhs(model.grid(), model.tables(), t, out);
}

}  // namespace

PicardResult picard_solve_Y(const Model& model, const ScalarField& u0, double horizon, int n_iters, double dt) {
  if (n_iters < 1) throw std::invalid_argument("picard: n_iters must be >= 1");
  if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("picard: horizon and dt must be positive");
  if (model.mode() == ShiftMode::Special) throw std::invalid_argument("picard: the iteration needs a general mode");
  const Grid& g = model.grid();
  const auto& K = model.kernels();
  const int steps = std::max(1, static_cast<int>(std::ceil(horizon / dt - 1e-9)));
  dt = horizon / steps;
  if (dt > cfl_dt(g, 0.0, model.options().cfl_safety) * (1.0 + 1e-12)) {
    throw SimulationError(FailureKind::CFLError, 0.0, "picard: time step above the diffusive limit");
  }

  PicardResult res;
  res.times.resize(std::size_t(steps) + 1);
  for (int k = 0; k <= steps; ++k) res.times[std::size_t(k)] = k * dt;

  // u does not depend on Y: one Heun trajectory serves every iterate.
  std::vector<ScalarField> u(std::size_t(steps) + 1, ScalarField(g));
  u[0] = u0;
  {
    ScalarField k1(g), k2(g), us(g);
    const auto prob = model.u_problem();
    for (int k = 0; k < steps; ++k) {
      const auto& a = u[std::size_t(k)];
      auto& b = u[std::size_t(k) + 1];
      K.u_rhs(g, model.tables(), prob, a.values.data(), k1.values.data());
      for (std::size_t q = 0; q < us.size(); ++q) us[q] = a[q] + dt * k1[q];
      K.u_rhs(g, model.tables(), prob, us.values.data(), k2.values.data());
      for (std::size_t q = 0; q < us.size(); ++q) b[q] = a[q] + 0.5 * dt * (k1[q] + k2[q]);
    }
  }

  std::vector<ScalarField> prev(std::size_t(steps) + 1, ScalarField(g));
  std::vector<ScalarField> next(std::size_t(steps) + 1, ScalarField(g));
  std::vector<double> m_prev(std::size_t(steps) + 1, 0.0);
  ScalarField r1(g), r2(g), Ys(g);
  Frozen fa, fb;
  for (int it = 0; it < n_iters; ++it) {
    next[0] = ScalarField(g);
    freeze(model, fa, 0.0, u[0], prev[0], m_prev[0]);
    m_prev[0] = fa.s.m;
    for (int k = 0; k < steps; ++k) {
      const auto kk = std::size_t(k);
      freeze(model, fb, res.times[kk + 1], u[kk + 1], prev[kk + 1], m_prev[kk + 1]);
      m_prev[kk + 1] = fb.s.m;
      linear_rhs(model, fa, next[kk].values.data(), r1.values.data());
      for (std::size_t q = 0; q < Ys.size(); ++q) Ys[q] = next[kk][q] + dt * r1[q];
      linear_rhs(model, fb, Ys.values.data(), r2.values.data());
      for (std::size_t q = 0; q < Ys.size(); ++q) next[kk + 1][q] = next[kk][q] + 0.5 * dt * (r1[q] + r2[q]);
      if (!next[kk + 1].all_finite()) {
        throw SimulationError(FailureKind::Diverged, res.times[kk + 1], "picard: non-finite iterate");
      }
      std::swap(fa, fb);
    }
    double diff = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const auto d = next[std::size_t(k)] - prev[std::size_t(k)];
      diff = std::max(diff, std::sqrt(integrate(d * d)));
    }
    res.successive_diffs.push_back(diff);
    std::swap(prev, next);
    const auto n = res.successive_diffs.size();
    if (n >= 3 && res.successive_diffs[n - 1] > res.successive_diffs[n - 2] &&
        res.successive_diffs[n - 2] > res.successive_diffs[n - 3]) {
      res.non_contraction = true;
    }
  }
  res.trajectory = std::move(prev);
  return res;
}

}  // namespace shockshift

#include "shockshift/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>

namespace shockshift {

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols{"t",       "E",        "D_grad",  "D_proj", "g",
                                             "hM",      "m",        "W_Y",     "W_gradY", "gradY_L2",
                                             "lapY_L2", "f_gap",    "c",       "entropy_residual"};
  return cols;
}

void write_csv_header(std::ostream& out) {
  const auto& cols = diagnostics_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  const double v[] = {r.t,       r.E,       r.D_grad,   r.D_proj,  r.g,     r.hM, r.m,
                      r.W_Y,     r.W_gradY, r.gradY_L2, r.lapY_L2, r.f_gap, r.c,  r.entropy_residual};
  char buf[32];
  std::string line;
  for (std::size_t k = 0; k < std::size(v); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", v[k]);
    if (k) line += ',';
    line += buf;
  }
  line += '\n';
  out << line;  // one write per row keeps the file free of partial rows
}

namespace {

auto abs_slope(const ShockProfile& p) {
  return [&p](double x) { return std::abs(p.slope(x)); };
}

double grad_sq_integral(const ScalarField& f, const std::function<double(double)>* weight = nullptr,
                        double shift = 0.0) {
  const auto gr = gradient(f);
  ScalarField sq(f.grid);
  for (const auto& c : gr.comp) {
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k] += c[k] * c[k];
  }
  return weight ? weighted_integrate(sq, *weight, shift) : integrate(sq);
}

}  // namespace

double contraction_energy(const ScalarField& u, const ScalarField& V) {
  const auto d = u - V;
  return integrate(d * d);
}

std::pair<double, double> dissipation_terms(const ScalarField& u, const ScalarField& V, const ShockProfile& profile,
                                            double m) {
  const auto d = u - V;
  const double proj = weighted_integrate(d, [&profile](double x) { return profile.slope(x); }, m);
  return {grad_sq_integral(d), proj * proj};
}

std::pair<double, double> weighted_shift_norms(const ScalarField& Y, double m, const ShockProfile& profile) {
  ScalarField d(Y.grid);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = (Y[k] - m) * (Y[k] - m);
  const std::function<double(double)> w = abs_slope(profile);
  return {weighted_integrate(d, w, m), grad_sq_integral(Y, &w, m)};
}

double f_gap(const ScalarField& Y, double m, const ShockProfile& profile) {
  const Grid& g = Y.grid;
  const std::size_t S = g.slice();
  ScalarField d(g);
  for (int i = 0; i < g.n1; ++i) {
    const double ref = profile.value(g.x1(i) + m);
    for (std::size_t j = 0; j < S; ++j) {
      const double gap = profile.value(g.x1(i) + Y[i * S + j]) - ref;
      d[i * S + j] = gap * gap;
    }
  }
  return integrate(d);
}

double c_special(const ScalarField& Y, const ShockProfile& profile) {
  const auto w = abs_slope(profile);
  const double num = weighted_integrate(Y, w, 0.0);
  const double den = weighted_integrate(ScalarField(Y.grid, 1.0), w, 0.0);
  return num / den;
}

IdentityTerms identity_terms(const FluxField& flux, const ScalarField& u, const ScalarField& V, const VectorField& w,
                             const ScalarField& G) {
  IdentityTerms r;
  const auto d = u - V;
  r.E = integrate(d * d);
  r.D_grad = grad_sq_integral(d);
  const auto gV = gradient(V);
  ScalarField integrand(u.grid);
  const int n = std::min<int>(flux.n_components(), u.grid.dim);
  for (std::size_t k = 0; k < integrand.size(); ++k) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) {
      const double rel = d[k] * flux.w_kernel_component(c, u[k], V[k]);  // A_c(u|V)
      acc += (rel - d[k] * w.comp[std::size_t(c)][k]) * gV.comp[std::size_t(c)][k];
    }
    integrand[k] = -acc - d[k] * G[k];
  }
  r.rhs = integrate(integrand);
  return r;
}

ScalarField source_G(const SimState& s, const Model& model) {
  const Grid& g = model.grid();
  ScalarField G(g);
  if (!model.has_sources()) return G;
  const std::size_t S = g.slice();
  const auto psi = model.psi_rows(s.m);
  const auto& w1 = s.w.comp[0];
  for (int i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = i * S + j;
      const double up = model.profile().slope(g.x1(i) + s.Y[k]);
      G[k] = up * ((w1[k] - s.h) * (1.0 - psi[std::size_t(i)]) + s.g);
    }
  }
  return G;
}

IdentityTerms identity_terms(const SimState& s, const Model& model) {
  return identity_terms(model.flux(), s.u, s.V, s.w, source_G(s, model));
}

double entropy_identity_residual(const IdentityTerms& a, const IdentityTerms& b, double dt) {
  const double lhs = (b.E - a.E) / (2.0 * dt) + 0.5 * (a.D_grad + b.D_grad);
  return std::abs(lhs - 0.5 * (a.rhs + b.rhs));
}

double entropy_identity_residual(const SimState& prev, const SimState& next, const Model& model, double dt) {
  return entropy_identity_residual(identity_terms(prev, model), identity_terms(next, model), dt);
}

double residual_V(const SimState& prev, const SimState& next, const Model& model, double dt) {
  const Grid& g = model.grid();
  const std::size_t S = g.slice();
  auto operator_terms = [&](const SimState& s) {
    ScalarField T(g);
    model.kernels().u_rhs(g, model.tables(), model.u_problem(), s.V.values.data(), T.values.data());
    const auto gV = gradient(s.V);
    const auto G = source_G(s, model);
    for (std::size_t k = 0; k < T.size(); ++k) {
      double drift = 0.0;
      for (int c = 0; c < g.dim; ++c) drift += s.w.comp[std::size_t(c)][k] * gV.comp[std::size_t(c)][k];
      T[k] += G[k] - drift;
    }
    return T;
  };
  const auto Ta = operator_terms(prev), Tb = operator_terms(next);
  // Rows 1 and n1 - 2 are skipped too: their 4-point stencil reads the u ghosts
  // U(-+(L + dx1)), not U(x1 + Y), and that mismatch grows like 1/dx1.
  double worst = 0.0;
  for (int i = 2; i + 2 < g.n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = i * S + j;
      const double r = (next.V[k] - prev.V[k]) / dt - 0.5 * (Ta[k] + Tb[k]);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

DiagnosticsRecord diagnostics(const SimState& s, const Model& model) {
  DiagnosticsRecord r;
  const auto& p = model.profile();
  r.t = s.t;
  r.g = s.g;
  r.hM = s.h;
  r.m = s.m;
  r.c = c_special(s.Y, p);
  const auto [dg, dp] = dissipation_terms(s.u, s.V, p, s.m);
  r.E = contraction_energy(s.u, s.V);
  r.D_grad = dg;
  r.D_proj = dp;
  const bool special = model.mode() == ShiftMode::Special;
  const double center = special ? r.c : s.m;
  const double shift = special ? 0.0 : s.m;
  ScalarField dev(s.Y.grid);
  for (std::size_t k = 0; k < dev.size(); ++k) dev[k] = (s.Y[k] - center) * (s.Y[k] - center);
  const std::function<double(double)> w = abs_slope(p);
  r.W_Y = weighted_integrate(dev, w, shift);
  r.W_gradY = grad_sq_integral(s.Y, &w, shift);
  r.gradY_L2 = std::sqrt(grad_sq_integral(s.Y));
  const auto lap = laplacian(s.Y);
  r.lapY_L2 = std::sqrt(integrate(lap * lap));
  r.f_gap = f_gap(s.Y, center, p);
  return r;
}

}  // namespace shockshift

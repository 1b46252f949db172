#include "shockshift/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace shockshift {

std::string to_string(LemmaId id) { return id == LemmaId::Poincare22 ? "poincare" : "pointwise"; }

LemmaId lemma_from_string(const std::string& s) {
  if (s == "poincare" || s == "Poincare22") return LemmaId::Poincare22;
  if (s == "pointwise" || s == "Pointwise23") return LemmaId::Pointwise23;
  throw std::invalid_argument("unknown lemma '" + s + "' (expected poincare or pointwise)");
}

namespace {

// Left sides below this fraction of the field scale are treated as round-off:
// a recentred constant leaves ~1e-17 behind, which must not count as a violation.
constexpr double kZeroRel = 1e-24;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double grad_sq(const VectorField& g, std::size_t k, int first_axis) {
  double s = 0.0;
  for (std::size_t c = std::size_t(first_axis); c < g.comp.size(); ++c) s += g.comp[c][k] * g.comp[c][k];
  return s;
}

double field_scale_sq(const ScalarField& f) {
  const double s = sup_norm(f);
  return s * s;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  const std::uint64_t h = splitmix64(splitmix64(seed ^ splitmix64(stream)) + counter);
  return double(h >> 11) * 0x1.0p-53;
}

RatioCheck check_poincare(const ScalarField& f, const std::function<double(double)>& phi1,
                          const std::function<double(double)>& phi2, double m) {
  const double lhs = weighted_integrate(f * f, phi1, m);
  const double proj = weighted_integrate(f, phi2, m);
  const auto gr = gradient(f);
  ScalarField sq(f.grid);
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = grad_sq(gr, k, 0);
  const double bracket = proj * proj + integrate(sq);

  RatioCheck r;
  const double floor = kZeroRel * std::max(1.0, field_scale_sq(f));
  if (bracket > 0.0) {
    r.ratio = lhs / bracket;
  } else if (lhs > floor) {
    r.violation = true;
    r.ratio = std::numeric_limits<double>::infinity();
  }
  return r;
}

RatioCheck check_pointwise(const ScalarField& Ytilde, const ShockProfile& profile, double m) {
  const Grid& g = Ytilde.grid;
  const std::size_t S = g.slice();
  auto w = [&profile](double x) { return std::abs(profile.slope(x)); };

  const double mean =
      weighted_integrate(Ytilde, w, m) / weighted_integrate(ScalarField(g, 1.0), w, m);
  ScalarField Y(g);
  for (std::size_t k = 0; k < Y.size(); ++k) Y[k] = Ytilde[k] - mean;

  std::vector<double> wr(std::size_t(g.n1));
  for (int i = 0; i < g.n1; ++i) wr[std::size_t(i)] = w(g.x1(i) + m);

  const auto gr = gradient(Y);
  // Line integrals in x1, one per transverse node, and the transverse volume term.
  std::vector<double> line(S, 0.0);
  double vol = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const double tw = (i == 0 || i == g.n1 - 1 ? 0.5 : 1.0) * g.dx1 * wr[std::size_t(i)];
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = i * S + j;
      const double d1 = gr.comp[0][k];
      line[j] += tw * d1 * d1;
      vol += tw * g.cell_perp() * grad_sq(gr, k, 1);
    }
  }

  RatioCheck r;
  const double floor = kZeroRel * std::max(1.0, field_scale_sq(Ytilde));
  for (int i = 0; i < g.n1; ++i) {
    const double a = wr[std::size_t(i)];
    const double xm = std::abs(g.x1(i) + m);
    for (std::size_t j = 0; j < S; ++j) {
      const double y = Y[i * S + j];
      const double lhs = a * y * y;
      const double rhs = (xm + a) * line[j] + a * vol;
      if (rhs > 0.0) {
        r.ratio = std::max(r.ratio, lhs / rhs);
      } else if (lhs > floor * std::max(a, 1e-300)) {
        r.violation = true;
      }
    }
  }
  if (r.violation) r.ratio = std::numeric_limits<double>::infinity();
  return r;
}

ScalarField inequality_sample(const Grid& grid, std::uint64_t seed, int id, int max_wavenumber, std::string* kind) {
  const auto stream = std::uint64_t(id);
  std::uint64_t ctr = 0;
  auto uni = [&](double a, double b) { return a + (b - a) * counter_uniform(seed, stream, ctr++); };
  auto wave = [&](int kmax) { return int(std::floor(uni(0.0, kmax + 1.0 - 1e-12))); };
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double L = grid.L;

  if (counter_uniform(seed, stream, ctr++) < 0.5) {
    // Tensor trigonometric modes: x1 modes fit [-L, L], transverse modes are periodic.
    struct Term {
      double amp, k1, p1, k2, p2, k3, p3;
    };
    const int n_terms = 1 + wave(2);
    std::vector<Term> terms;
    for (int t = 0; t < n_terms; ++t) {
      Term tm{};
      tm.amp = uni(-1.0, 1.0);
      int k1 = wave(max_wavenumber), k2 = wave(max_wavenumber), k3 = grid.dim == 3 ? wave(max_wavenumber) : 0;
      if (k1 == 0 && k2 == 0 && k3 == 0) k2 = 1;
      tm.k1 = std::numbers::pi * k1 / L;
      tm.p1 = uni(0.0, two_pi);
      tm.k2 = two_pi * k2;
      tm.p2 = uni(0.0, two_pi);
      tm.k3 = two_pi * k3;
      tm.p3 = uni(0.0, two_pi);
      terms.push_back(tm);
    }
    if (kind) *kind = "trig";
    return sample(grid, [&](double x1, double x2, double x3) {
      double s = 0.0;
      for (const auto& t : terms) {
        s += t.amp * std::cos(t.k1 * x1 + t.p1) * std::cos(t.k2 * x2 + t.p2) * std::cos(t.k3 * x3 + t.p3);
      }
      return s;
    });
  }

  const double amp = uni(0.2, 2.0) * (uni(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
  const double c1 = uni(-0.5 * L, 0.5 * L), c2 = uni(0.0, 1.0), c3 = uni(0.0, 1.0);
  const double s1 = uni(0.3, 4.0), sp = uni(0.05, 0.5);
  const double offset = uni(-1.0, 1.0);
  auto pdist = [](double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
  };
  if (kind) *kind = "bump";
  return sample(grid, [&](double x1, double x2, double x3) {
    const double d2 = pdist(x2, c2), d3 = grid.dim == 3 ? pdist(x3, c3) : 0.0;
    const double q = (x1 - c1) * (x1 - c1) / (2 * s1 * s1) + (d2 * d2 + d3 * d3) / (2 * sp * sp);
    return offset + amp * std::exp(-q);
  });
}

InequalityReport estimate_constant(LemmaId lemma, const SamplerConfig& cfg, const ShockProfile& profile,
                                   const Grid& grid) {
  if (cfg.n_samples < 1) throw std::invalid_argument("estimate_constant: n_samples must be >= 1");
  InequalityReport rep;
  rep.lemma = lemma;
  rep.n_samples = cfg.n_samples;
  rep.ratios.assign(std::size_t(cfg.n_samples), 0.0);
  rep.sample_kind.assign(std::size_t(cfg.n_samples), "");
  std::vector<char> viol(std::size_t(cfg.n_samples), 0);
  const std::function<double(double)> w = [&profile](double x) { return std::abs(profile.slope(x)); };

#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < cfg.n_samples; ++s) {
    std::string kind;
    const auto f = inequality_sample(grid, cfg.seed, s, cfg.max_wavenumber, &kind);
    const auto r = lemma == LemmaId::Poincare22 ? check_poincare(f, w, w, cfg.m) : check_pointwise(f, profile, cfg.m);
    rep.ratios[std::size_t(s)] = r.ratio;
    rep.sample_kind[std::size_t(s)] = kind;
    viol[std::size_t(s)] = r.violation;
  }

  // Sequential reduction: ties go to the lowest id, so the report does not
  // depend on the thread schedule.
  for (int s = 0; s < cfg.n_samples; ++s) {
    if (viol[std::size_t(s)]) ++rep.violations;
    if (rep.worst_sample_id < 0 || rep.ratios[std::size_t(s)] > rep.worst_ratio) {
      rep.worst_ratio = rep.ratios[std::size_t(s)];
      rep.worst_sample_id = s;
    }
  }
  rep.pass = rep.violations == 0 && std::isfinite(rep.worst_ratio);

  // Weight moment lost outside the truncated line [-L + m, L + m].
  const auto xs = profile.x1_nodes();
  const auto& du = profile.du_values();
  double tail = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double xa = xs[k], xb = xs[k + 1];
    const double mid = 0.5 * (xa + xb);
    if (mid > -grid.L + cfg.m && mid < grid.L + cfg.m) continue;
    const double fa = (1 + std::abs(xa)) * std::abs(du[k]), fb = (1 + std::abs(xb)) * std::abs(du[k + 1]);
    tail += 0.5 * (fa + fb) * (xb - xa);
  }
  rep.truncation_moment = tail;
  return rep;
}

}  // namespace shockshift

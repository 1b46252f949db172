#include "shockshift/flux.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shockshift {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double Polynomial::derivative(double u, int order) const noexcept {
  const int n = static_cast<int>(coeffs_.size());
  double acc = 0.0;
  for (int k = n - 1; k >= order; --k) {
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
    acc = acc * u + falling * coeffs_[static_cast<std::size_t>(k)];
  }
  return acc;
}

double Polynomial::divided_difference(double u, double v) const noexcept {
  // sum_k c_k * sum_{j<k} u^j v^(k-1-j), with the inner sums built by h_k = u*h_{k-1} + v^k.
  double acc = 0.0, h = 0.0, vk = 1.0;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    h = (k == 1) ? 1.0 : u * h + vk;
    acc += coeffs_[k] * h;
    vk *= v;
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial{};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

QuadratureRule gauss_legendre_unit(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre_unit: order must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

std::string to_string(FluxKind kind) {
  switch (kind) {
    case FluxKind::Burgers: return "burgers";
    case FluxKind::CubicConvex: return "cubic";
    case FluxKind::CustomPolynomial: return "polynomial";
  }
  return "unknown";
}

namespace {

std::vector<Polynomial> default_transverse(int n_components, std::vector<Polynomial> transverse) {
  if (n_components < 1) throw std::invalid_argument("flux: n_components must be >= 1");
  if (transverse.empty()) {
    transverse.assign(static_cast<std::size_t>(n_components - 1), Polynomial({0.0, 1.0}));
  }
  if (static_cast<int>(transverse.size()) != n_components - 1) {
    throw std::invalid_argument("flux: expected " + std::to_string(n_components - 1) +
                                " transverse components, got " + std::to_string(transverse.size()));
  }
  return transverse;
}

void require_finite(double u) {
  if (!std::isfinite(u)) throw std::domain_error("flux: non-finite state");
}

}  // namespace

FluxField::FluxField(FluxKind kind, std::vector<Polynomial> components)
    : kind_(kind), components_(std::move(components)) {
  for (const auto& p : components_) {
    second_.push_back(p.derivative().derivative());
    // A(u|v)/(u-v) integrates (1-r) A''(.) which has degree deg(A) - 1.
    const int needed = std::max(1, (p.degree() + 1) / 2);
    exact_rules_.push_back(gauss_legendre_unit(needed));
  }
}

FluxField FluxField::burgers(int n_components, std::vector<Polynomial> transverse) {
  auto comps = default_transverse(n_components, std::move(transverse));
  comps.insert(comps.begin(), Polynomial({0.0, 0.0, 0.5}));
  return FluxField(FluxKind::Burgers, std::move(comps));
}

FluxField FluxField::cubic_convex(int n_components, std::vector<Polynomial> transverse) {
  auto comps = default_transverse(n_components, std::move(transverse));
  comps.insert(comps.begin(), Polynomial({0.0, 1.0, 0.0, 1.0 / 3.0}));
  return FluxField(FluxKind::CubicConvex, std::move(comps));
}

FluxField FluxField::custom(Polynomial a1, std::vector<Polynomial> transverse) {
  std::vector<Polynomial> comps;
  comps.push_back(std::move(a1));
  for (auto& p : transverse) comps.push_back(std::move(p));
  return FluxField(FluxKind::CustomPolynomial, std::move(comps));
}

std::vector<double> FluxField::eval(double u) const {
  require_finite(u);
  std::vector<double> out;
  out.reserve(components_.size());
  for (const auto& p : components_) out.push_back(p(u));
  return out;
}

std::vector<double> FluxField::eval_deriv(double u, int order) const {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("flux: derivative order must be 1, 2 or 3, got " + std::to_string(order));
  }
  require_finite(u);
  std::vector<double> out;
  out.reserve(components_.size());
  for (const auto& p : components_) out.push_back(p.derivative(u, order));
  return out;
}

std::vector<double> FluxField::relative(double u, double v) const {
  require_finite(u);
  require_finite(v);
  std::vector<double> out;
  out.reserve(components_.size());
  const double d = u - v;
  for (const auto& p : components_) out.push_back(p(u) - p(v) - p.derivative(v, 1) * d);
  return out;
}

std::vector<double> FluxField::w_kernel(double u, double v) const {
  require_finite(u);
  require_finite(v);
  static const QuadratureRule rule = gauss_legendre_unit(8);
  const double d = u - v;
  std::vector<double> out(components_.size(), 0.0);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    double acc = 0.0;
    for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
      const double tau = rule.nodes[a];
      double inner = 0.0;
      for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
        inner += rule.weights[b] * second_[k](v + rule.nodes[b] * tau * d);
      }
      acc += rule.weights[a] * tau * inner;
    }
    out[k] = d * acc;
  }
  return out;
}

double FluxField::w_kernel_component(int k, double u, double v) const noexcept {
  const auto kk = static_cast<std::size_t>(k);
  const auto& rule = exact_rules_[kk];
  const auto& a2 = second_[kk];
  const double d = u - v;
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double r = rule.nodes[q];
    acc += rule.weights[q] * (1.0 - r) * a2(v + r * d);
  }
  return d * acc;
}

bool FluxField::a1_convex_on(double lo, double hi, double margin, int samples) const {
  if (lo > hi) std::swap(lo, hi);
  const double pad = margin * (hi - lo);
  lo -= pad;
  hi += pad;
  for (int i = 0; i < samples; ++i) {
    const double u = lo + (hi - lo) * i / (samples - 1);
    if (!(second_[0](u) > 0.0)) return false;
  }
  return true;
}

double FluxField::max_abs_second_derivative(double lo, double hi, int samples) const {
  if (lo > hi) std::swap(lo, hi);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double u = samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1);
    for (const auto& p : second_) best = std::max(best, std::abs(p(u)));
  }
  return best;
}

}  // namespace shockshift

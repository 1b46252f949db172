#pragma once

#include <span>
#include <string>
#include <vector>

namespace shockshift {

/// Dense polynomial, coefficient k multiplies u^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  double operator()(double u) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
    return acc;
  }
  /// y[j] = p(x[j]) for j < n, same Horner order as operator(); y must not alias x.
  void eval_many(const double* x, double* y, std::size_t n) const noexcept {
    horner_many(coeffs_.data(), degree(), x, y, n);
  }
  /// order-th derivative evaluated at u (order >= 0).
  double derivative(double u, int order) const noexcept;
  Polynomial derivative() const;
  /// (p(u) - p(v)) / (u - v), evaluated without cancellation; p'(u) when u == v.
  double divided_difference(double u, double v) const noexcept;

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

 private:
  std::vector<double> coeffs_{0.0};

  // restrict: otherwise every store to y may clobber the coefficients and the loops stay scalar
  static void horner_many(const double* __restrict c, int d, const double* __restrict x, double* __restrict y,
                          std::size_t n) noexcept {
    const double cd = c[d];
    for (std::size_t j = 0; j < n; ++j) y[j] = 0.0 * x[j] + cd;
    for (int k = d - 1; k >= 0; --k) {
      const double ck = c[k];
      for (std::size_t j = 0; j < n; ++j) y[j] = y[j] * x[j] + ck;
    }
  }
};

/// Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre_unit(int order);

enum class FluxKind { Burgers, CubicConvex, CustomPolynomial };

std::string to_string(FluxKind kind);

/// The flux vector A = (A_1, ..., A_N). A_1 is the normal flux and must be
/// strictly convex on the states a shock connects; A_2..A_N act along the
/// periodic transverse directions.
class FluxField {
 public:
  /// A_1 = u^2/2. Transverse fluxes default to A_i = u.
  static FluxField burgers(int n_components, std::vector<Polynomial> transverse = {});
  /// A_1 = u^3/3 + u. Transverse fluxes default to A_i = u.
  static FluxField cubic_convex(int n_components, std::vector<Polynomial> transverse = {});
  static FluxField custom(Polynomial a1, std::vector<Polynomial> transverse);

  FluxKind kind() const noexcept { return kind_; }
  int n_components() const noexcept { return static_cast<int>(components_.size()); }
  const Polynomial& component(int k) const { return components_.at(static_cast<std::size_t>(k)); }

  /// (A_1(u), ..., A_N(u)). Throws std::domain_error on non-finite u.
  std::vector<double> eval(double u) const;
  /// Componentwise derivative of order 1, 2 or 3; other orders throw std::invalid_argument.
  std::vector<double> eval_deriv(double u, int order) const;

  /// A(u|v) = A(u) - A(v) - A'(v)(u - v).
  std::vector<double> relative(double u, double v) const;

  /// A(u|v)/(u - v) from the double-integral form
  ///   (u - v) * int_0^1 int_0^1 A''(v + s*tau*(u - v)) tau ds dtau
  /// with an 8x8 Gauss-Legendre rule. Smooth through u == v.
  std::vector<double> w_kernel(double u, double v) const;

  /// Component k of A(u|v)/(u - v) via the equivalent single integral
  /// (u - v) * int_0^1 (1 - r) A''(v + r(u - v)) dr, with a Gauss rule exact
  /// for the component's degree. Used by the stepping kernels.
  double w_kernel_component(int k, double u, double v) const noexcept;

  /// Samples A_1'' on [lo, hi] widened by `margin` times its length.
  /// Returns false if any sample is <= 0.
  bool a1_convex_on(double lo, double hi, double margin = 0.1, int samples = 257) const;

  /// Largest |A_k''| sampled on [lo, hi] over all components.
  double max_abs_second_derivative(double lo, double hi, int samples = 257) const;

 private:
  FluxField(FluxKind kind, std::vector<Polynomial> components);

  FluxKind kind_ = FluxKind::CustomPolynomial;
  std::vector<Polynomial> components_;
  std::vector<Polynomial> second_;  // A_k''
  std::vector<QuadratureRule> exact_rules_;
};

}  // namespace shockshift

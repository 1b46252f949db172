#include "shockshift/profile.hpp"

#include <algorithm>
#include <cmath>

namespace shockshift {

namespace {

constexpr double kTailTol = 1e-13;

// Fritsch-Carlson limiting of node derivatives for a monotone Hermite fit.
std::vector<double> limit_slopes(const std::vector<double>& u, std::vector<double> m, double dx) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double secant = (u[k + 1] - u[k]) / dx;
    if (secant == 0.0) {
      m[k] = 0.0;
      m[k + 1] = 0.0;
      continue;
    }
    double a = m[k] / secant;
    double b = m[k + 1] / secant;
    if (a < 0.0) m[k] = a = 0.0;
    if (b < 0.0) m[k + 1] = b = 0.0;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double t = 3.0 / std::sqrt(r2);
      m[k] = t * a * secant;
      m[k + 1] = t * b * secant;
    }
  }
  return m;
}

// Least-squares slope of log|U - target| over nodes with x in [lo, hi].
double fit_log_slope(const ShockProfile& p, double target, double lo, double hi) {
  const auto xs = p.x1_nodes();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] < lo || xs[k] > hi) continue;
    const double gap = std::abs(p.u_values()[k] - target);
    if (gap <= 0.0) continue;
    const double y = std::log(gap);
    sx += xs[k];
    sy += y;
    sxx += xs[k] * xs[k];
    sxy += xs[k] * y;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ShockProfile::ShockProfile(FluxField flux, double u_minus, double u_plus, double u_star, double x_first,
                           double dx, std::vector<double> u_values, std::vector<double> du_values)
    : flux_(std::move(flux)),
      u_minus_(u_minus),
      u_plus_(u_plus),
      u_star_(u_star),
      x_first_(x_first),
      dx_(dx),
      inv_dx_(1.0 / dx),
      decay_minus_(std::abs(flux_.component(0).derivative(u_minus, 1))),
      decay_plus_(std::abs(flux_.component(0).derivative(u_plus, 1))),
      u_(std::move(u_values)),
      du_(std::move(du_values)) {
  if (u_.size() < 2 || u_.size() != du_.size()) throw ProfileError("profile: table needs >= 2 matching nodes");
  hermite_slope_ = limit_slopes(u_, du_, dx_);
  cubic_.assign(4 * (u_.size() - 1), 0.0);
  for (std::size_t k = 0; k + 1 < u_.size(); ++k) {
    const double u0 = u_[k], u1 = u_[k + 1];
    const double m0 = hermite_slope_[k] * dx_, m1 = hermite_slope_[k + 1] * dx_;
    double* c = cubic_.data() + 4 * k;
    c[0] = u0;
    c[1] = m0;
    c[2] = 3.0 * (u1 - u0) - 2.0 * m0 - m1;
    c[3] = 2.0 * (u0 - u1) + m0 + m1;
  }
}

std::vector<double> ShockProfile::x1_nodes() const {
  std::vector<double> xs(u_.size());
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = x_first_ + dx_ * static_cast<double>(k);
  return xs;
}

double sonic_state(const FluxField& flux, double u_minus, double u_plus) {
  const auto& a1 = flux.component(0);
  double lo = u_plus, hi = u_minus;
  if (!(a1.derivative(lo, 1) < 0.0 && a1.derivative(hi, 1) > 0.0)) {
    throw ProfileError("profile: Lax condition A1'(u+) < 0 < A1'(u-) violated");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (a1.derivative(mid, 1) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ShockProfile solve_profile(const FluxField& flux, double u_minus, double u_plus, double x1_max, double dx) {
  if (!(dx > 0.0) || !(x1_max > 0.0)) throw ProfileError("profile: dx and x1_max must be positive");
  if (!(u_minus > u_plus)) throw ProfileError("profile: need u_minus > u_plus");
  const auto& a1 = flux.component(0);
  const double rh = std::abs(a1(u_minus) - a1(u_plus));
  if (rh >= 1e-10) {
    throw ProfileError("profile: Rankine-Hugoniot violated, |A1(u-) - A1(u+)| = " + std::to_string(rh));
  }
  if (!flux.a1_convex_on(u_plus, u_minus, 0.0)) {
    throw ProfileError("profile: A1 is not strictly convex between the end states");
  }
  const double u_star = sonic_state(flux, u_minus, u_plus);
  // A_1(U) - A_1(u_plus), factored through the nearer end state so the tails
  // keep full relative precision. R-H makes both forms agree to 1e-10.
  auto rhs = [&](double u) {
    return u < u_star ? (u - u_plus) * a1.divided_difference(u, u_plus)
                      : (u - u_minus) * a1.divided_difference(u, u_minus);
  };

  auto integrate = [&](double h, double target) {
    std::vector<double> us{u_star};
    double u = u_star;
    const auto max_steps = static_cast<std::size_t>(std::ceil(x1_max / dx));
    for (std::size_t step = 0; step < max_steps; ++step) {
      const double k1 = rhs(u);
      const double k2 = rhs(u + 0.5 * h * k1);
      const double k3 = rhs(u + 0.5 * h * k2);
      const double k4 = rhs(u + h * k3);
      u += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
      us.push_back(u);
      if (std::abs(u - target) < kTailTol) break;
    }
    return us;
  };
  const auto right = integrate(dx, u_plus);
  const auto left = integrate(-dx, u_minus);

  std::vector<double> values(left.rbegin(), left.rend());
  values.insert(values.end(), right.begin() + 1, right.end());
  std::vector<double> slopes(values.size());
  std::transform(values.begin(), values.end(), slopes.begin(), rhs);
  const double x_first = -dx * static_cast<double>(left.size() - 1);
  return ShockProfile(flux, u_minus, u_plus, u_star, x_first, dx, std::move(values), std::move(slopes));
}

double eval_profile(const ShockProfile& profile, double x1) { return profile.value(x1); }

double eval_profile_deriv(const ShockProfile& profile, double x1) { return profile.slope(x1); }

ProfileCertificate check_profile(const ShockProfile& p, const ProfileTolerances& tol) {
  ProfileCertificate c;
  const auto& a1 = p.flux().component(0);
  c.rh_residual = std::abs(a1(p.u_minus()) - a1(p.u_plus()));
  c.rh_pass = c.rh_residual <= tol.rh;
  c.lax_pass = a1.derivative(p.u_plus(), 1) < 0.0 && a1.derivative(p.u_minus(), 1) > 0.0;
  c.normalization_error = std::abs(p.value(0.0) - p.u_star());
  c.normalization_pass = c.normalization_error <= tol.normalization;

  const auto& u = p.u_values();
  const auto& du = p.du_values();
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(du[k] < 0.0)) ++c.monotonicity_violations;
    if (k + 1 < n && !(u[k + 1] < u[k])) ++c.monotonicity_violations;
  }

  // |U'| peaks at the node x1 = 0 and decreases away from it.
  const auto zero = static_cast<std::size_t>(std::llround(-p.x_first() / p.dx()));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = std::abs(du[k]), b = std::abs(du[k + 1]);
    if (k + 1 <= zero && b < a) ++c.peak_violations;
    if (k >= zero && b > a) ++c.peak_violations;
  }

  c.tail_slope_plus = -fit_log_slope(p, p.u_plus(), 5.0 / p.decay_plus(), 10.0 / p.decay_plus());
  c.tail_slope_minus = fit_log_slope(p, p.u_minus(), -10.0 / p.decay_minus(), -5.0 / p.decay_minus());
  c.tail_error_plus = std::abs(c.tail_slope_plus - p.decay_plus()) / p.decay_plus();
  c.tail_error_minus = std::abs(c.tail_slope_minus - p.decay_minus()) / p.decay_minus();
  c.tail_pass = c.tail_error_plus <= tol.tail_relative && c.tail_error_minus <= tol.tail_relative;

  const double h = p.dx();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double lhs = (std::abs(du[k + 1]) - 2 * std::abs(du[k]) + std::abs(du[k - 1])) / (h * h);
    const double b_next = a1.derivative(u[k + 1], 1) * std::abs(du[k + 1]);
    const double b_prev = a1.derivative(u[k - 1], 1) * std::abs(du[k - 1]);
    worst = std::max(worst, std::abs(lhs - (b_next - b_prev) / (2 * h)));
  }
  c.uprime_residual = worst;
  c.uprime_pass = worst <= tol.uprime;

  c.pass = c.rh_pass && c.lax_pass && c.normalization_pass && c.monotonicity_violations == 0 &&
           c.peak_violations == 0 && c.tail_pass && c.uprime_pass;
  return c;
}

}  // namespace shockshift

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shockshift/flux.hpp"

namespace shockshift {

class ProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tabulated stationary viscous shock U(x1) solving (A_1(U))' = U'' with
/// U -> u_minus as x1 -> -inf and U -> u_plus as x1 -> +inf, pinned so that
/// U(0) = u_star where A_1'(u_star) = 0.
///
/// Nodes are uniform, x_k = x_first + k*dx. Evaluation uses monotone cubic
/// Hermite interpolation and clamps to the end states outside the table.
class ShockProfile {
 public:
  ShockProfile(FluxField flux, double u_minus, double u_plus, double u_star, double x_first, double dx,
               std::vector<double> u_values, std::vector<double> du_values);

  double u_minus() const noexcept { return u_minus_; }
  double u_plus() const noexcept { return u_plus_; }
  double u_star() const noexcept { return u_star_; }
  double decay_minus() const noexcept { return decay_minus_; }
  double decay_plus() const noexcept { return decay_plus_; }
  double dx() const noexcept { return dx_; }
  double x_first() const noexcept { return x_first_; }
  double x_last() const noexcept { return x_first_ + dx_ * static_cast<double>(u_.size() - 1); }
  std::size_t size() const noexcept { return u_.size(); }
  const FluxField& flux() const noexcept { return flux_; }

  std::vector<double> x1_nodes() const;
  const std::vector<double>& u_values() const noexcept { return u_; }
  const std::vector<double>& du_values() const noexcept { return du_; }

  /// U(x1), always inside [u_plus, u_minus].
  double value(double x1) const noexcept;
  /// U'(x1) of the interpolant, always <= 0; zero outside the table.
  double slope(double x1) const noexcept;
  /// u[j] = U(x[j]) for j < n; branch-free so the loop vectorizes. Same values as value(); out must not alias x.
  void value_many(const double* x, double* u, std::size_t n) const noexcept;
  /// Both at once; the stepping kernels call this per node.
  void value_and_slope(double x1, double& u, double& du) const noexcept;

  /// Replaces one stored derivative value. Only meant for fault-injection tests
  /// of the certificate; interpolation slopes are left untouched.
  void inject_du_value(std::size_t k, double value) { du_.at(k) = value; }

 private:
  FluxField flux_;
  double u_minus_, u_plus_, u_star_;
  double x_first_, dx_, inv_dx_;
  double decay_minus_, decay_plus_;
  std::vector<double> u_, du_;
  std::vector<double> hermite_slope_;  // Fritsch-Carlson limited
  std::vector<double> cubic_;          // per interval, powers of the local t: 4 coefficients each
};

inline void ShockProfile::value_and_slope(double x1, double& u, double& du) const noexcept {
  const double s = (x1 - x_first_) * inv_dx_;
  if (!(s >= 0.0)) {  // also catches NaN
    u = u_minus_;
    du = 0.0;
    return;
  }
  const auto last = static_cast<double>(u_.size() - 1);
  if (s >= last) {
    u = u_plus_;
    du = 0.0;
    return;
  }
  const auto k = static_cast<std::size_t>(s);
  const double t = s - static_cast<double>(k);
  const double* c = cubic_.data() + 4 * k;
  u = std::clamp(((c[3] * t + c[2]) * t + c[1]) * t + c[0], u_plus_, u_minus_);
  du = std::min(0.0, ((3.0 * c[3] * t + 2.0 * c[2]) * t + c[1]) * inv_dx_);
}

namespace detail {
// Free function so the restrict qualifiers reach the vectorizer (gathers need them).
inline void hermite_many(const double* __restrict x, double* __restrict out, std::size_t n,
                         const double* __restrict cubic, double x_first, double inv_dx, double last, double u_plus,
                         double u_minus) noexcept {
  for (std::size_t j = 0; j < n; ++j) {
    const double s = (x[j] - x_first) * inv_dx;
    const bool left = !(s >= 0.0), right = s >= last;
    const double sc = (left | right) ? 0.0 : s;
    const auto k = static_cast<std::int64_t>(sc);
    const double t = sc - static_cast<double>(k);
    const double* c = cubic + 4 * k;
    double v = ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
    v = v < u_plus ? u_plus : v;
    v = v > u_minus ? u_minus : v;
    out[j] = left ? u_minus : (right ? u_plus : v);
  }
}
}  // namespace detail

inline void ShockProfile::value_many(const double* x, double* out, std::size_t n) const noexcept {
  detail::hermite_many(x, out, n, cubic_.data(), x_first_, inv_dx_, static_cast<double>(u_.size() - 1), u_plus_,
                       u_minus_);
}

inline double ShockProfile::value(double x1) const noexcept {
  double u, du;
  value_and_slope(x1, u, du);
  return u;
}

inline double ShockProfile::slope(double x1) const noexcept {
  double u, du;
  value_and_slope(x1, u, du);
  return du;
}

/// Integrates U' = A_1(U) - A_1(u_plus) outward from U(0) = u_star with RK4 at
/// step dx until |U - u_pm| < 1e-13 or |x1| > x1_max.
/// Throws ProfileError for a pair violating Rankine-Hugoniot, the Lax
/// inequalities, or convexity of A_1 between the states.
ShockProfile solve_profile(const FluxField& flux, double u_minus, double u_plus, double x1_max, double dx);

double eval_profile(const ShockProfile& profile, double x1);
double eval_profile_deriv(const ShockProfile& profile, double x1);

struct ProfileCertificate {
  double rh_residual = 0.0;
  bool rh_pass = false;
  bool lax_pass = false;
  double normalization_error = 0.0;  // |U(0) - u_star|
  bool normalization_pass = false;
  int monotonicity_violations = 0;
  int peak_violations = 0;  // |U'| not maximal at 0 / not decreasing in |x1|
  double tail_slope_minus = 0.0;  // fitted decay rate on the left tail
  double tail_slope_plus = 0.0;
  double tail_error_minus = 0.0;  // relative to decay_minus
  double tail_error_plus = 0.0;
  bool tail_pass = false;
  double uprime_residual = 0.0;  // sup | |U'|'' - (A_1'(U)|U'|)' | in the interior
  bool uprime_pass = false;
  bool pass = false;
};

struct ProfileTolerances {
  double rh = 1e-10;
  double normalization = 1e-10;
  double tail_relative = 0.02;
  double uprime = 1e-3;
};

ProfileCertificate check_profile(const ShockProfile& profile, const ProfileTolerances& tol = {});

/// The state in (u_plus, u_minus) where A_1' vanishes.
double sonic_state(const FluxField& flux, double u_minus, double u_plus);

}  // namespace shockshift

#pragma once

// Per-node stencil kernels behind the coupled stepper. Two implementations
// share one interface: `serial` is the straightforward node-by-node reference
// kept for testing, `omp` is the row-blocked, OpenMP-parallel version used by
// default. Both write into caller-owned buffers of grid.size() values.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "shockshift/flux.hpp"
#include "shockshift/grid.hpp"
#include "shockshift/profile.hpp"

namespace shockshift::kernels {

/// A_k, A_k', A_k'' as separate polynomials so the inner loops only run Horner.
struct FluxTables {
  int n = 0;
  std::array<Polynomial, 3> a, da, d2a;
  std::array<QuadratureRule, 3> wrule;  // exact for int_0^1 (1-r) A_k''(.) dr

  explicit FluxTables(const FluxField& flux);
};

/// Everything the u right side needs besides u itself.
struct UProblem {
  double ghost_left = 0.0;   // u at x1 = -L - dx1
  double ghost_right = 0.0;  // u at x1 = L + dx1
  const double* balance = nullptr;  // subtracted per node when non-null
};

struct Stats {
  double max_speed = 0.0;
  double min_stretch = 1.0;  // y_rhs only: min over nodes of 1 + d1 Y (central)
  bool finite = true;
};

/// Inputs of the Y right side
///   Y_t = -a.grad(Y) + A_1'(V)|grad Yc|^2 - w.grad(Yc) + lap(Y) + S,
///   a = (-A_1'(V), A_2'(V), ...),  S = -(w_1 - h) psi - h + g.
/// When `Yc == Y` the drift w.grad(Y) is folded into the upwinded velocity;
/// otherwise (Picard sweeps) it is an explicit central term on Yc.
struct YTerms {
  const double* Y = nullptr;
  const double* Yc = nullptr;
  const double* V = nullptr;
  std::array<const double*, 3> w{};  // null entries mean w == 0
  const double* psi_rows = nullptr;   // psi_M(x1 + m) per x1 row
  double h = 0.0;
  double g = 0.0;
  bool sources = true;
};

namespace serial {
  // -div A(u) + lap(u) - balance; zero at the Dirichlet rows.
  Stats u_rhs(const Grid& grid, const FluxTables& flux, const UProblem& prob, const double* u, double* out);
  Stats y_rhs(const Grid& grid, const FluxTables& flux, const YTerms& terms, double* out);
  // V = U(x1 + Y); reports max |A_k'(V)|.
  Stats compose_V(const Grid& grid, const ShockProfile& profile, const FluxTables& flux, const double* Y, double* V);
  // w_k = phi * A_k(u|V)/(u - V); reports max |w_k|.
  Stats w_field(const Grid& grid, const FluxTables& flux, double phi, const double* u, const double* V,
                std::array<double*, 3> w);
}  // namespace serial

namespace omp {
  Stats u_rhs(const Grid& grid, const FluxTables& flux, const UProblem& prob, const double* u, double* out);
  Stats y_rhs(const Grid& grid, const FluxTables& flux, const YTerms& terms, double* out);
  Stats compose_V(const Grid& grid, const ShockProfile& profile, const FluxTables& flux, const double* Y, double* V);
  Stats w_field(const Grid& grid, const FluxTables& flux, double phi, const double* u, const double* V,
                std::array<double*, 3> w);
}  // namespace omp

enum class Backend { Serial, OpenMP };

struct KernelSet {
  decltype(&serial::u_rhs) u_rhs;
  decltype(&serial::y_rhs) y_rhs;
  decltype(&serial::compose_V) compose_V;
  decltype(&serial::w_field) w_field;
};

const KernelSet& kernel_set(Backend backend);

/// Monotonized-central limited slope from the two one-sided differences.
inline double mc_slope(double dm, double dp) noexcept {
  if (dm * dp <= 0.0) return 0.0;
  const double a = std::min(2.0 * std::abs(dm), std::min(2.0 * std::abs(dp), 0.5 * std::abs(dm + dp)));
  return dm > 0.0 ? a : -a;
}

}  // namespace shockshift::kernels

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace shockshift {

/// Truncated box [-L, L] x T^(N-1), torus of circumference 1. Nodes in x1 include
/// both ends; transverse nodes are periodic without a duplicated endpoint.
/// Storage is row-major with x1 slowest, so every x1 index owns a contiguous
/// transverse slice of n_perp^(N-1) values.
struct Grid {
  int dim = 2;
  double L = 20.0;
  int n1 = 401;
  int n_perp = 64;
  double dx1 = 0.1;
  double dx_perp = 1.0 / 64.0;

  /// Validates N in {2,3}, L > 0, n1 >= 16, n_perp >= 8.
  static Grid make(int dim, double L, int n1, int n_perp);

  std::size_t slice() const noexcept { return dim == 2 ? std::size_t(n_perp) : std::size_t(n_perp) * n_perp; }
  std::size_t size() const noexcept { return std::size_t(n1) * slice(); }
  double x1(int i) const noexcept { return -L + dx1 * i; }
  double x_perp(int j) const noexcept { return dx_perp * j; }
  /// Transverse cell measure dx_perp^(N-1).
  double cell_perp() const noexcept { return dim == 2 ? dx_perp : dx_perp * dx_perp; }
  /// Trapezoid weight in x1 times the transverse cell measure.
  double node_weight(int i) const noexcept { return (i == 0 || i == n1 - 1 ? 0.5 : 1.0) * dx1 * cell_perp(); }
  double spacing(int axis) const noexcept { return axis == 0 ? dx1 : dx_perp; }
  /// Slice index of the periodic neighbour of slice node j, `step` nodes along
  /// transverse axis 1 (x2) or 2 (x3).
  std::size_t perp_neighbor(std::size_t j, int axis, int step) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(n_perp);
    auto wrap = [n](std::ptrdiff_t v) { return static_cast<std::size_t>(((v % n) + n) % n); };
    const auto jj = static_cast<std::ptrdiff_t>(j);
    if (dim == 2) return wrap(jj + step);
    const std::ptrdiff_t j2 = jj / n, j3 = jj % n;
    if (axis == 1) return wrap(j2 + step) * std::size_t(n) + std::size_t(j3);
    return std::size_t(j2) * std::size_t(n) + wrap(j3 + step);
  }

  bool operator==(const Grid&) const = default;
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t k) noexcept { return values[k]; }
  double operator[](std::size_t k) const noexcept { return values[k]; }
  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> row(int i) const noexcept { return {values.data() + i * grid.slice(), grid.slice()}; }
  bool all_finite() const noexcept;
};

struct VectorField {
  std::vector<ScalarField> comp;

  VectorField() = default;
  explicit VectorField(const Grid& g, double fill = 0.0) : comp(std::size_t(g.dim), ScalarField(g, fill)) {}
  const Grid& grid() const { return comp.front().grid; }
};

/// Builds a field from f(x1, x2, x3); x3 is 0 when N = 2.
ScalarField sample(const Grid& g, const std::function<double(double, double, double)>& f);

ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
/// Pointwise dot product of two vector fields.
ScalarField dot(const VectorField& a, const VectorField& b);
double sup_norm(const ScalarField& f);
double sup_abs_diff(const ScalarField& a, const ScalarField& b);

enum class BoundaryKind { Neumann, Dirichlet };

/// Ghost-node rule at x1 = -L (left) and x1 = +L (right).
struct X1Boundary {
  BoundaryKind kind = BoundaryKind::Neumann;
  double left = 0.0;
  double right = 0.0;

  static X1Boundary neumann() { return {}; }
  static X1Boundary dirichlet(double left, double right) { return {BoundaryKind::Dirichlet, left, right}; }
};

/// Central differences, periodic across x', second-order one-sided at x1 = +-L.
VectorField gradient(const ScalarField& f);
/// (2N+1)-point Laplacian; x1 ghosts come from `bc` (mirror for Neumann).
ScalarField laplacian(const ScalarField& f, const X1Boundary& bc = X1Boundary::neumann());
/// Sum of component central differences (same stencils as gradient).
ScalarField divergence(const VectorField& F);

/// Trapezoid in x1 times the rectangle rule on the torus.
double integrate(const ScalarField& f);
/// integrate(f(x) * weight(x1 + shift)), weight sampled once per x1 node.
double weighted_integrate(const ScalarField& f, const std::function<double(double)>& weight, double shift);
/// Transverse integrals of f, one per x1 node.
std::vector<double> row_integrals(const ScalarField& f);
/// Trapezoid of per-row values produced by row_integrals.
double integrate_rows(const Grid& g, std::span<const double> rows);

/// Flat binary snapshot: one text header line, then little-endian float64 values.
void write_snapshot(const std::string& path, const ScalarField& f, const std::string& name, double t);
ScalarField read_snapshot(const std::string& path, std::string* name = nullptr, double* t = nullptr);
/// Node coordinates and value per line; refuses grids larger than max_nodes.
void write_field_csv(const std::string& path, const ScalarField& f, std::size_t max_nodes = 200000);

}  // namespace shockshift

#include "shockshift/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shockshift {

namespace {

void require_same(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("field operation on mismatched grids");
}

}  // namespace

Grid Grid::make(int dim, double L, int n1, int n_perp) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid: N must be 2 or 3");
  if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
  if (n1 < 16) throw std::invalid_argument("grid: n1 must be >= 16");
  if (n_perp < 8) throw std::invalid_argument("grid: n_perp must be >= 8");
  Grid g;
  g.dim = dim;
  g.L = L;
  g.n1 = n1;
  g.n_perp = n_perp;
  g.dx1 = 2.0 * L / (n1 - 1);
  g.dx_perp = 1.0 / n_perp;
  return g;
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

ScalarField sample(const Grid& g, const std::function<double(double, double, double)>& f) {
  ScalarField out(g);
  const std::size_t S = g.slice();
  for (int i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t j2 = g.dim == 2 ? j : j / std::size_t(g.n_perp);
      const std::size_t j3 = g.dim == 2 ? 0 : j % std::size_t(g.n_perp);
      out[i * S + j] = f(g.x1(i), g.x_perp(int(j2)), g.x_perp(int(j3)));
    }
  }
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same(a.grid, b.grid);
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same(a.grid, b.grid);
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same(a.grid, b.grid);
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
  return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  ScalarField out(a.grid());
  for (std::size_t c = 0; c < a.comp.size(); ++c) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += a.comp[c][k] * b.comp[c][k];
  }
  return out;
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double sup_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same(a.grid, b.grid);
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  VectorField out(g);
  const std::size_t S = g.slice();
  const int n1 = g.n1;
  const double inv2h = 1.0 / (2.0 * g.dx1);
  auto& d1 = out.comp[0];
#pragma omp parallel for
  for (int i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = i * S + j;
      double v;
      if (i == 0) {
        v = (-3.0 * f[k] + 4.0 * f[k + S] - f[k + 2 * S]) * inv2h;
      } else if (i == n1 - 1) {
        v = (3.0 * f[k] - 4.0 * f[k - S] + f[k - 2 * S]) * inv2h;
      } else {
        v = (f[k + S] - f[k - S]) * inv2h;
      }
      d1[k] = v;
    }
  }
  const double inv2p = 1.0 / (2.0 * g.dx_perp);
  for (int axis = 1; axis < g.dim; ++axis) {
    auto& d = out.comp[std::size_t(axis)];
#pragma omp parallel for
    for (int i = 0; i < n1; ++i) {
      const std::size_t base = i * S;
      for (std::size_t j = 0; j < S; ++j) {
        d[base + j] = (f[base + g.perp_neighbor(j, axis, +1)] - f[base + g.perp_neighbor(j, axis, -1)]) * inv2p;
      }
    }
  }
  return out;
}

ScalarField laplacian(const ScalarField& f, const X1Boundary& bc) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const std::size_t S = g.slice();
  const int n1 = g.n1;
  const double ih2 = 1.0 / (g.dx1 * g.dx1);
  const double ip2 = 1.0 / (g.dx_perp * g.dx_perp);
#pragma omp parallel for
  for (int i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = i * S + j;
      double left, right;
      if (i == 0) {
        left = bc.kind == BoundaryKind::Neumann ? f[k + S] : bc.left;
      } else {
        left = f[k - S];
      }
      if (i == n1 - 1) {
        right = bc.kind == BoundaryKind::Neumann ? f[k - S] : bc.right;
      } else {
        right = f[k + S];
      }
      double acc = (left - 2.0 * f[k] + right) * ih2;
      for (int axis = 1; axis < g.dim; ++axis) {
        acc += (f[i * S + g.perp_neighbor(j, axis, +1)] - 2.0 * f[k] + f[i * S + g.perp_neighbor(j, axis, -1)]) *
               ip2;
      }
      out[k] = acc;
    }
  }
  return out;
}

ScalarField divergence(const VectorField& F) {
  const Grid& g = F.grid();
  if (static_cast<int>(F.comp.size()) != g.dim) throw std::invalid_argument("divergence: component count != N");
  ScalarField out(g);
  for (int axis = 0; axis < g.dim; ++axis) {
    const auto d = gradient(F.comp[std::size_t(axis)]).comp[std::size_t(axis)];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += d[k];
  }
  return out;
}

std::vector<double> row_integrals(const ScalarField& f) {
  const Grid& g = f.grid;
  const std::size_t S = g.slice();
  std::vector<double> rows(std::size_t(g.n1));
  const double cell = g.cell_perp();
#pragma omp parallel for
  for (int i = 0; i < g.n1; ++i) {
    double acc = 0.0;
    const double* r = f.values.data() + i * S;
    for (std::size_t j = 0; j < S; ++j) acc += r[j];
    rows[std::size_t(i)] = acc * cell;
  }
  return rows;
}

double integrate_rows(const Grid& g, std::span<const double> rows) {
  double acc = 0.0;
  for (int i = 0; i < g.n1; ++i) acc += (i == 0 || i == g.n1 - 1 ? 0.5 : 1.0) * rows[std::size_t(i)];
  return acc * g.dx1;
}

double integrate(const ScalarField& f) { return integrate_rows(f.grid, row_integrals(f)); }

double weighted_integrate(const ScalarField& f, const std::function<double(double)>& weight, double shift) {
  auto rows = row_integrals(f);
  for (int i = 0; i < f.grid.n1; ++i) rows[std::size_t(i)] *= weight(f.grid.x1(i) + shift);
  return integrate_rows(f.grid, rows);
}

}  // namespace shockshift

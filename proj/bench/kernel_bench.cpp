// Serial reference vs OpenMP kernels on the default 401 x 64 box.
#include <benchmark/benchmark.h>

#include <cmath>

#include "shockshift/dynamics.hpp"

using namespace shockshift;

namespace {

struct Setup {
  FluxField flux = FluxField::burgers(2);
  ShockProfile profile = solve_profile(flux, 1.0, -1.0, 200.0, 0.005);
  Grid grid;
  kernels::FluxTables tables{flux};
  ScalarField u, Y, V, out;
  VectorField w;

  explicit Setup(int n1, int np) : grid(Grid::make(2, 20.0, n1, np)) {
    u = sample(grid, [&](double x1, double x2, double) {
      return profile.value(x1) + 0.01 * std::exp(-x1 * x1) * std::cos(6.283185307179586 * x2);
    });
    Y = sample(grid, [](double x1, double x2, double) { return 0.02 * std::exp(-0.1 * x1 * x1) * std::sin(6.283185307179586 * x2); });
    V = ScalarField(grid);
    out = ScalarField(grid);
    w = VectorField(grid);
    kernels::omp::compose_V(grid, profile, tables, Y.values.data(), V.values.data());
  }
};

Setup& setup(int n1, int np) {
  static Setup s(n1, np);
  return s;
}

template <kernels::Backend B>
void BM_u_rhs(benchmark::State& st) {
  auto& s = setup(401, 64);
  const auto& K = kernels::kernel_set(B);
  const double ghost_l = s.profile.value(-s.grid.L - s.grid.dx1), ghost_r = s.profile.value(s.grid.L + s.grid.dx1);
  const kernels::UProblem prob{ghost_l, ghost_r, nullptr};
  for (auto _ : st) {
    K.u_rhs(s.grid, s.tables, prob, s.u.values.data(), s.out.values.data());
    benchmark::DoNotOptimize(s.out.values.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid.size()));
}

template <kernels::Backend B>
void BM_y_rhs(benchmark::State& st) {
  auto& s = setup(401, 64);
  const auto& K = kernels::kernel_set(B);
  std::vector<double> psi(std::size_t(s.grid.n1), 1.0);
  kernels::YTerms t;
  t.Y = s.Y.values.data();
  t.Yc = t.Y;
  t.V = s.V.values.data();
  t.w = {s.w.comp[0].values.data(), s.w.comp[1].values.data(), nullptr};
  t.psi_rows = psi.data();
  t.sources = true;
  for (auto _ : st) {
    K.y_rhs(s.grid, s.tables, t, s.out.values.data());
    benchmark::DoNotOptimize(s.out.values.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid.size()));
}

template <kernels::Backend B>
void BM_compose_V(benchmark::State& st) {
  auto& s = setup(401, 64);
  const auto& K = kernels::kernel_set(B);
  for (auto _ : st) {
    K.compose_V(s.grid, s.profile, s.tables, s.Y.values.data(), s.V.values.data());
    benchmark::DoNotOptimize(s.V.values.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid.size()));
}

template <kernels::Backend B>
void BM_w_field(benchmark::State& st) {
  auto& s = setup(401, 64);
  const auto& K = kernels::kernel_set(B);
  std::array<double*, 3> w{s.w.comp[0].values.data(), s.w.comp[1].values.data(), nullptr};
  for (auto _ : st) {
    K.w_field(s.grid, s.tables, 1.0, s.u.values.data(), s.V.values.data(), w);
    benchmark::DoNotOptimize(w[0]);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid.size()));
}

}  // namespace

BENCHMARK(BM_u_rhs<kernels::Backend::Serial>)->Name("u_rhs/serial");
BENCHMARK(BM_u_rhs<kernels::Backend::OpenMP>)->Name("u_rhs/omp");
BENCHMARK(BM_y_rhs<kernels::Backend::Serial>)->Name("y_rhs/serial");
BENCHMARK(BM_y_rhs<kernels::Backend::OpenMP>)->Name("y_rhs/omp");
BENCHMARK(BM_compose_V<kernels::Backend::Serial>)->Name("compose_V/serial");
BENCHMARK(BM_compose_V<kernels::Backend::OpenMP>)->Name("compose_V/omp");
BENCHMARK(BM_w_field<kernels::Backend::Serial>)->Name("w_field/serial");
BENCHMARK(BM_w_field<kernels::Backend::OpenMP>)->Name("w_field/omp");

BENCHMARK_MAIN();

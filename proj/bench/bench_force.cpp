#include <benchmark/benchmark.h>
#include <omp.h>

#include "perifract/dynamics.hpp"

using namespace perifract;

namespace {

struct Problem {
  DomainSpec spec;
  Grid grid;
  BondTable bonds;
  MaterialModel model;
  KernelTable kernel;
  std::vector<Vec2> u;

  explicit Problem(double epsilon)
      : spec(make_spec(epsilon)),
        grid(build_grid(spec)),
        bonds(build_bonds(grid, spec)),
        model(calibrate(3.24e9, 500.0, 1200.0, InfluenceFunction())),
        kernel(make_kernel_table(bonds.stencil(), model, spec.epsilon)),
        u(grid.size()) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2& x = grid.x[i];
      u[i] = {1e-4 * x.x * x.y / spec.a, 2e-4 * x.y * x.y / spec.b};
    }
  }

  static DomainSpec make_spec(double epsilon) {
    DomainSpec s;
    s.a = 0.05;
    s.b = 0.075;
    s.ell0 = 0.0125;
    s.epsilon = epsilon;
    s.d = epsilon;
    s.delta = epsilon;
    return s;
  }
};

Problem& problem(double epsilon) {
  static Problem coarse(2.5e-3);
  static Problem fine(1.25e-3);
  return epsilon > 2e-3 ? coarse : fine;
}

double eps_of(const benchmark::State& state) { return state.range(0) == 0 ? 2.5e-3 : 1.25e-3; }

void BM_force_serial(benchmark::State& state) {
  Problem& p = problem(eps_of(state));
  for (auto _ : state) {
    std::vector<Vec2> f = assemble_force_serial(p.grid, p.bonds, p.u, p.model, p.spec.epsilon);
    benchmark::DoNotOptimize(f.data());
  }
  state.counters["bonds"] = double(p.grid.size() * p.bonds.width());
}

void BM_force_openmp(benchmark::State& state) {
  Problem& p = problem(eps_of(state));
  const int threads = static_cast<int>(state.range(1));
  omp_set_num_threads(threads);
  std::vector<Vec2> f(p.grid.size());
  for (auto _ : state) {
    assemble_force(p.kernel, p.bonds, p.u, f);
    benchmark::DoNotOptimize(f.data());
  }
  state.counters["bonds"] = double(p.grid.size() * p.bonds.width());
}

void thread_args(benchmark::internal::Benchmark* b) {
  for (int e : {0, 1}) {
    for (int t = 1; t <= omp_get_max_threads(); t *= 2) b->Args({e, t});
  }
}

}  // namespace

BENCHMARK(BM_force_serial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_force_openmp)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

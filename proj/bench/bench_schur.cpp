#include "spectainer/containment.hpp"
#include "spectainer/schur.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace spectainer;

namespace {

SdpProblem bilinear_problem(int t) {
  BilinearDomain dom = spectrahedral_bilinear_domain(
      instance("tv-screen"), instance("two-disks"), Matrix::Identity(4, 4));
  return compile(build_bilinear_relaxation(dom, t)).sdp.problem;
}

SdpProblem hierarchy_problem(int t) {
  return compile(build_projected_module_membership(instance("tv-screen"), ball_pencil(2, 1.2), t))
      .sdp.problem;
}

BlockMatrix random_pd(const SdpProblem& p, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  BlockMatrix out;
  for (const auto& b : p.blocks) {
    if (b.kind == BlockKind::Diagonal) {
      Matrix d(b.size, 1);
      for (int i = 0; i < b.size; ++i) d(i, 0) = 1.0 + std::abs(n(rng));
      out.push_back(d);
    } else {
      Matrix g(b.size, b.size);
      for (int i = 0; i < b.size; ++i)
        for (int j = 0; j < b.size; ++j) g(i, j) = n(rng);
      out.push_back(g * g.transpose() / b.size + Matrix::Identity(b.size, b.size));
    }
  }
  return out;
}

SdpProblem problem_for(int which) {
  switch (which) {
    case 0: return hierarchy_problem(1);
    case 1: return hierarchy_problem(2);
    default: return bilinear_problem(1);
  }
}

void schur(benchmark::State& state, bool parallel) {
  const SdpProblem p = problem_for(static_cast<int>(state.range(0)));
  const SchurPlan plan(p);
  const BlockMatrix x = random_pd(p, 1);
  const BlockMatrix sinv = random_pd(p, 2);
  for (auto _ : state) benchmark::DoNotOptimize(schur_hkm(p, plan, x, sinv, parallel));
  state.counters["constraints"] = p.num_constraints();
}

void BM_SchurSerial(benchmark::State& s) { schur(s, false); }
void BM_SchurParallel(benchmark::State& s) { schur(s, true); }

void BM_SchurReference(benchmark::State& state) {
  const SdpProblem p = problem_for(static_cast<int>(state.range(0)));
  const BlockMatrix x = random_pd(p, 1);
  const BlockMatrix sinv = random_pd(p, 2);
  for (auto _ : state) benchmark::DoNotOptimize(schur_hkm_reference(p, x, sinv));
}

void solve_bench(benchmark::State& state, bool parallel) {
  const SdpProblem p = problem_for(static_cast<int>(state.range(0)));
  SdpOptions o;
  o.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, o));
}

void BM_SolveSerial(benchmark::State& s) { solve_bench(s, false); }
void BM_SolveParallel(benchmark::State& s) { solve_bench(s, true); }

}  // namespace

BENCHMARK(BM_SchurReference)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurSerial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurParallel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveSerial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveParallel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

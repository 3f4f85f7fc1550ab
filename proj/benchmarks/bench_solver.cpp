#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "oglasso/experiment.hpp"
#include "oglasso/outer.hpp"
#include "oglasso/prox_dual.hpp"

using namespace oglasso;

namespace {

Vec random_vec(std::mt19937& rng, int len) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(len);
  for (int i = 0; i < len; ++i) v[i] = gauss(rng);
  return v;
}

void BM_apply_A(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto gs = GroupStructure::chain(n, 0.2, 10);
  std::mt19937 rng(1);
  const Vec y = random_vec(rng, gs.dual_dim());
  for (auto _ : state) benchmark::DoNotOptimize(gs.apply_A(y));
  state.SetItemsProcessed(state.iterations() * gs.dual_dim());
}
BENCHMARK(BM_apply_A)->Arg(100)->Arg(1000)->Arg(10000);

void BM_project_dual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto gs = GroupStructure::chain(n, 0.2, 10).with_weights(0.5);
  std::mt19937 rng(2);
  const Vec y = random_vec(rng, gs.dual_dim());
  for (auto _ : state) benchmark::DoNotOptimize(gs.project_dual_feasible(y));
}
BENCHMARK(BM_project_dual)->Arg(100)->Arg(1000)->Arg(10000);

void BM_subproblem_enhanced(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto gs = GroupStructure::chain(n, 0.2, 10).with_weights(0.1);
  std::mt19937 rng(3);
  const Vec u = random_vec(rng, n);
  const ProxSubproblem sp{u, 1.0, &gs, Vec::Zero(n)};
  const TerminationRule rule = TerminationRule::option2(0.5, 1e-4);
  for (auto _ : state) {
    auto res = solve_subproblem_enhanced(sp, rule, {Vec::Zero(gs.dual_dim()), 1.0});
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_subproblem_enhanced)->Arg(100)->Arg(1000);

void BM_full_solve_logistic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto data = std::make_shared<Dataset>(
      synthetic_logistic_dataset(n, 4 * n, 0.1, 7));
  const LogisticLoss loss(data);
  const auto gs = GroupStructure::chain(n, 0.1, 10).with_weights(0.02);
  OuterConfig cfg;
  cfg.alpha_mode = AlphaMode::practical;
  cfg.eps_tol = 1e-4;
  for (auto _ : state) {
    auto out = solve(loss, gs, cfg);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_full_solve_logistic)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

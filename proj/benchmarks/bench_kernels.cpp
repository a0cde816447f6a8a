// Microbenchmarks for the hot paths of one scheduler iteration: the message
// update kernel, residual refresh, frontier selection, and full bulk steps.

#include <benchmark/benchmark.h>

#include <random>

#include "bpsched/generators.hpp"
#include "bpsched/messages.hpp"
#include "bpsched/mrf.hpp"
#include "bpsched/residuals.hpp"
#include "bpsched/schedulers.hpp"

using namespace bpsched;

namespace {

const PairwiseMRF& grid30() {
  static const PairwiseMRF g = generate_ising({30, 2.5, 1});
  return g;
}

SchedulerConfig base_config(SchedulerKind kind) {
  SchedulerConfig cfg;
  cfg.kind = kind;
  cfg.worker_count = 1;
  return cfg;
}

void BM_UpdateMessage(benchmark::State& state) {
  const PairwiseMRF& g = grid30();
  const MessageStore store = init_messages(g);
  std::vector<double> out(g.max_cardinality());
  std::vector<double> scratch(g.max_cardinality());
  directed_edge_id d = 0;
  for (auto _ : state) {
    detail::update_message_into(g, store, d, out, scratch);
    benchmark::DoNotOptimize(out.data());
    d = (d + 1) % g.num_directed_edges();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_UpdateMessage);

void BM_FullRefresh(benchmark::State& state) {
  const PairwiseMRF& g = grid30();
  const MessageStore store = init_messages(g);
  ResidualTracker tracker(g, store, 1e-5);
  std::vector<directed_edge_id> all(g.num_directed_edges());
  for (directed_edge_id d = 0; d < all.size(); ++d) all[d] = d;
  for (auto _ : state) {
    refresh_residuals(g, store, tracker, all);
    benchmark::DoNotOptimize(tracker.unconverged_count());
  }
  state.SetItemsProcessed(state.iterations() * g.num_directed_edges());
}
BENCHMARK(BM_FullRefresh);

void BM_TopKSelect(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<double> residuals(39600);
  for (double& r : residuals) r = uniform_unit(rng);
  const uint64_t k = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_top_k(residuals, k).data());
  }
  state.SetItemsProcessed(state.iterations() * residuals.size());
}
BENCHMARK(BM_TopKSelect)->Arg(155)->Arg(2475)->Arg(39600);

void BM_LbpIteration(benchmark::State& state) {
  const PairwiseMRF& g = grid30();
  EngineState engine(g, base_config(SchedulerKind::lbp));
  const std::vector<directed_edge_id> frontier = frontier_lbp(engine);
  for (auto _ : state) {
    apply_frontier(engine, frontier);
  }
  state.SetItemsProcessed(state.iterations() * frontier.size());
}
BENCHMARK(BM_LbpIteration);

void BM_RnbpFrontier(benchmark::State& state) {
  const PairwiseMRF& g = grid30();
  EngineState engine(g, base_config(SchedulerKind::rnbp));
  std::mt19937_64 rng(9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rnbp_frontier(engine, 0.7, rng).data());
  }
}
BENCHMARK(BM_RnbpFrontier);

void BM_RsFrontier(benchmark::State& state) {
  const PairwiseMRF& g = grid30();
  EngineState engine(g, base_config(SchedulerKind::rs));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rs_frontier(engine, 1.0 / 64.0, 2).data());
  }
}
BENCHMARK(BM_RsFrontier);

void BM_SplashIteration(benchmark::State& state) {
  const PairwiseMRF& g = grid30();
  EngineState engine(g, base_config(SchedulerKind::rs));
  for (auto _ : state) {
    apply_splash_frontier(engine, rs_frontier(engine, 1.0 / 64.0, 2));
  }
}
BENCHMARK(BM_SplashIteration);

} // namespace

BENCHMARK_MAIN();

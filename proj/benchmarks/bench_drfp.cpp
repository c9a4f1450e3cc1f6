#include <benchmark/benchmark.h>

#include <filesystem>

#include "drfp/harness.hpp"

using namespace drfp;

namespace {

const std::filesystem::path kFixtures = DRFP_FIXTURE_DIR;

const RunConfig& four_node() {
  static const RunConfig c = load_config(kFixtures / "configs/four_node_periodic.json");
  return c;
}

void BM_EpigraphRound(benchmark::State& state) {
  const auto& c = four_node();
  const auto e = lift(c.problem);
  const auto seq = c.graph.build(c.problem.nodes());
  auto states = initial_states(e.nodes(), e.dimension(), 1);
  long k = 0;
  for (auto _ : state) {
    states = epigraph_round(states, seq.matrix(k), c.engine.schedule(k), c.engine.beta, e);
    ++k;
    benchmark::DoNotOptimize(states.front().theta.data());
  }
}
BENCHMARK(BM_EpigraphRound);

void BM_GenericRound(benchmark::State& state) {
  const auto& c = four_node();
  const auto g = to_generic(lift(c.problem));
  const auto seq = c.graph.build(c.problem.nodes());
  auto states = initial_states(g.nodes(), g.dimension(), 1);
  long k = 0;
  for (auto _ : state) {
    states = drfp_round(states, seq.matrix(k), c.engine.schedule(k), c.engine.beta, g);
    ++k;
    benchmark::DoNotOptimize(states.front().theta.data());
  }
}
BENCHMARK(BM_GenericRound);

void BM_EstimatePi(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto seq = GraphSequence::seeded_random({n, 0.3, 9}, 3, 1.0 / n);
  long k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pi(seq, k++, 1e-10, 100000).pi.data());
}
BENCHMARK(BM_EstimatePi)->Arg(4)->Arg(16)->Arg(64);

void BM_JointConnectivity(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto seq = GraphSequence::seeded_random({n, 0.1, 3}, 4, 1.0 / n);
  for (auto _ : state) benchmark::DoNotOptimize(check_joint_connectivity(seq, 4, 1000));
}
BENCHMARK(BM_JointConnectivity)->Arg(8)->Arg(64);

void BM_CentralizedOracle(benchmark::State& state) {
  const auto& c = four_node();
  for (auto _ : state) benchmark::DoNotOptimize(solve_centralized(c.problem, 1e-4).value);
}
BENCHMARK(BM_CentralizedOracle)->Unit(benchmark::kMillisecond);

void BM_FullRun(benchmark::State& state) {
  auto c = four_node();
  c.rounds = state.range(0);
  c.trace.every = c.rounds;
  for (auto _ : state) benchmark::DoNotOptimize(run(c, 1).rounds_executed);
}
BENCHMARK(BM_FullRun)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

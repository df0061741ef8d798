#include <benchmark/benchmark.h>

#include <variant>

#include "dirlat/atsp_path.hpp"
#include "dirlat/generator.hpp"
#include "dirlat/guessing.hpp"
#include "dirlat/lp.hpp"
#include "dirlat/oracle.hpp"
#include "dirlat/pipeline.hpp"

using namespace dirlat;

namespace {

NiceInstance nice_of(int clients, Cost cmax, std::uint64_t seed) {
  return std::get<NiceInstance>(
      reduce_to_nice(generate_instance({clients, cmax, seed}), Rational(1), {Scaling::Auto}));
}

void BM_ExactOpt(benchmark::State& state) {
  Instance inst = generate_instance({static_cast<int>(state.range(0)), 20, 1});
  for (auto _ : state) benchmark::DoNotOptimize(exact_opt(inst).total);
}
BENCHMARK(BM_ExactOpt)->Arg(8)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_PlainLp(benchmark::State& state) {
  NiceInstance nice = nice_of(static_cast<int>(state.range(0)), 2, 3);
  const Cost T = compute_horizon(nice, nullptr, true).horizon;
  TimeNetwork net = build_network(nice, {}, T);
  LpModel model = build_base_lp(net, nice);
  SolveOptions opts;
  opts.method = state.range(1) ? LpMethod::Arcs : LpMethod::Paths;
  for (auto _ : state) benchmark::DoNotOptimize(solve(model, net, opts).objective);
  state.SetLabel(std::string(to_string(opts.method)) + " T=" + std::to_string(T));
}
BENCHMARK(BM_PlainLp)->Args({3, 0})->Args({3, 1})->Args({7, 0})->Unit(benchmark::kMillisecond);

void BM_Separation(benchmark::State& state) {
  NiceInstance nice = nice_of(7, 3, 5);
  TimeNetwork net = build_network(nice, {}, 60);
  LpModel model = build_base_lp(net, nice);
  SolveOptions opts;
  opts.max_rounds = 0;  // the uncut optimum usually violates cuts
  LpSolution sol = solve(model, net, opts);
  SeparationOptions sep;
  sep.most_violated = true;
  for (auto _ : state) benchmark::DoNotOptimize(separate_per_client(sol, net, sep).size());
}
BENCHMARK(BM_Separation)->Unit(benchmark::kMillisecond);

void BM_SplitOff(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  Instance metric = generate_instance({size - 1, 9, 2});
  MetricFlow flow(metric.cost, 0, size - 1);
  for (int v = 0; v + 1 < size; ++v) {
    flow.f[v][v + 1] += 0.5;
    if (v + 2 < size) flow.f[v][v + 2] += 0.5;
  }
  std::vector<int> keep{0, size - 1};
  std::vector<double> coverage(size, 0.0);
  for (int v = 2; v + 1 < size; v += 2) {
    keep.push_back(v);
    coverage[v] = terminal_connectivity(flow, v);
  }
  for (auto _ : state) benchmark::DoNotOptimize(split_off(flow, keep, coverage).total_cost());
}
BENCHMARK(BM_SplitOff)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_SetupTriples(benchmark::State& state) {
  NiceInstance nice = nice_of(15, 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(setup_triples(nice, state.range(0)).size());
}
BENCHMARK(BM_SetupTriples)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_Pipeline(benchmark::State& state) {
  Instance inst = generate_instance({3, 2, 9});
  PipelineOptions opts;
  opts.compare_oracle = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_pipeline(inst, opts).best->total);
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

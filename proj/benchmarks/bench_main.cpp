#include <benchmark/benchmark.h>

#include <cmath>

#include "cpsarch/falsify.hpp"
#include "cpsarch/flowgraph.hpp"
#include "cpsarch/metrics.hpp"
#include "cpsarch/stl.hpp"
#include "cpsarch/sut.hpp"

using namespace cpsarch;

namespace {

// Synthetic model: `n` gain stages in a chain, every third stage scoped,
// grouped under nested subsystems of width 10.
Model chain_model(int n) {
  Model model;
  model.name = "chain";
  std::string parent(kRootId);
  for (int i = 0; i < n; ++i) {
    if (i % 10 == 0) {
      Block sub;
      sub.id = "sub" + std::to_string(i);
      sub.name = sub.id;
      sub.block_type = std::string(kSubsystemType);
      sub.parent = parent;
      parent = sub.id;
      model.blocks.push_back(std::move(sub));
    }
    Block b;
    b.id = "g" + std::to_string(i);
    b.name = b.id;
    b.block_type = i % 3 == 0 ? "Scope" : "Gain";
    b.parent = parent;
    model.blocks.push_back(std::move(b));
    if (i > 0) {
      model.connections.push_back(
          {"g" + std::to_string(i - 1), 0, "g" + std::to_string(i), 0});
    }
  }
  return model;
}

Trace sc_trace(std::size_t samples) {
  Trace trace;
  trace.timestamps.reserve(samples);
  std::vector<double>& pressure = trace.signals["pressure"];
  for (std::size_t i = 0; i < samples; ++i) {
    trace.timestamps.push_back(static_cast<double>(i) * 0.01);
    pressure.push_back(87.25 + 0.2 * std::sin(0.05 * static_cast<double>(i)));
  }
  return trace;
}

void BM_ComputeMetrics(benchmark::State& state) {
  Model model = chain_model(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    MetricsReport report = compute_metrics(model, builtin_catalog());
    benchmark::DoNotOptimize(report);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ComputeMetrics)->Range(64, 4096)->Complexity();

void BM_BuildFlowGraph(benchmark::State& state) {
  Model model = chain_model(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    FlowGraph graph = build_flow_graph(model, builtin_catalog(), {true, true});
    benchmark::DoNotOptimize(graph);
  }
}
BENCHMARK(BM_BuildFlowGraph)->Range(64, 4096);

void BM_Robustness(benchmark::State& state) {
  Trace trace = sc_trace(static_cast<std::size_t>(state.range(0)));
  // widen the window to the trace span so the fold dominates
  double span = trace.timestamps.back();
  char text[64];
  std::snprintf(text, sizeof(text), "G[0,%.2f] (abs(pressure - 87.25) < 1)",
                span * 0.8);
  stl::StlFormula phi = stl::parse_stl(text, {{"pressure", "Pa"}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(stl::robustness(phi, trace, 0.0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Robustness)->Range(256, 16384)->Complexity();

void BM_SimulateSc(benchmark::State& state) {
  SutPtr sut = builtin_suts().at("sc-pid");
  Trace input;
  input.timestamps = sample_grid(0.1, 35.0);
  input.signals["disturbance"] =
      std::vector<double>(input.timestamps.size(), 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sut->simulate(input));
  }
}
BENCHMARK(BM_SimulateSc);

void BM_FalsifyIteration(benchmark::State& state) {
  SutPtr sut = builtin_suts().at("sc-pid");
  const auto& req = stl::builtin_requirements().at("SC");
  InputSpec spec;
  spec.channels.push_back(
      {"disturbance", -1.0, 1.0, 4, Interpolation::PiecewiseLinear});
  AnnealingSchedule schedule;
  schedule.max_iterations = 10;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    schedule.rng_seed = seed++;
    benchmark::DoNotOptimize(
        falsify_once(*sut, req.formula, spec, schedule));
  }
}
BENCHMARK(BM_FalsifyIteration);

}  // namespace

BENCHMARK_MAIN();

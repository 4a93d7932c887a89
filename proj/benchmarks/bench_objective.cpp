#include <benchmark/benchmark.h>

#include "tempheno/loss.hpp"
#include "tempheno/random.hpp"
#include "tempheno/synthgen.hpp"

namespace {

using namespace tempheno;

struct Instance {
  PhenotypeTensor phenotypes;
  PathwayCollection pathways;
  IrregularTensor data;
};

Instance make_instance(std::size_t rank, std::size_t individuals, std::size_t duration) {
  GenConfig cfg;
  cfg.individuals = individuals;
  cfg.duration = duration;
  cfg.seed = 1;
  Instance inst;
  inst.data = generate(cfg).data;
  Rng rng(rank);
  inst.phenotypes = PhenotypeTensor(rank, cfg.features, cfg.window);
  for (auto& m : inst.phenotypes.data) {
    for (double& v : m.values()) v = uniform01(rng);
  }
  for (const auto& x : inst.data.matrices) {
    Matrix w(rank, pathway_length(x.cols(), cfg.window));
    for (double& v : w.values()) v = uniform01(rng);
    inst.pathways.matrices.push_back(std::move(w));
  }
  return inst;
}

void BM_Reconstruct(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 500, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct_all(inst.phenotypes, inst.pathways));
  }
  state.SetItemsProcessed(state.iterations() * inst.data.individuals());
}
BENCHMARK(BM_Reconstruct)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_ReconstructBatched(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 500, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct_batched_regular(inst.phenotypes, inst.pathways.matrices));
  }
  state.SetItemsProcessed(state.iterations() * inst.data.individuals());
}
BENCHMARK(BM_ReconstructBatched)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_TotalLoss(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 500, state.range(1));
  HyperParams hp;
  hp.rank = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_loss(inst.phenotypes, inst.pathways, inst.data, hp));
  }
}
BENCHMARK(BM_TotalLoss)->Args({4, 10})->Args({8, 10})->Args({4, 40})->Unit(benchmark::kMicrosecond);

void BM_Gradients(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 500, 10);
  HyperParams hp;
  hp.rank = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gradients(inst.phenotypes, inst.pathways, inst.data, hp, GradTarget::Both));
  }
}
BENCHMARK(BM_Gradients)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

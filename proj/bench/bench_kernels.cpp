#include <benchmark/benchmark.h>

#include "bass/centrality.hpp"
#include "bass/dsgd.hpp"
#include "bass/heuristic.hpp"
#include "bass/rng.hpp"
#include "bass/topology.hpp"

namespace {

bass::Graph bench_graph(int n) { return bass::generate_topology(bass::TopologyKind::geometric, n, 0.3, 7); }

void BM_Betweenness(benchmark::State& state) {
    const auto g = bench_graph(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bass::betweenness(g));
}

void BM_BetweennessReference(benchmark::State& state) {
    const auto g = bench_graph(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bass::reference::betweenness(g));
}

struct GramInput {
    bass::Graph g;
    bass::Partition p;
    bass::Vector probs;
};

GramInput gram_input(int n) {
    GramInput in{bench_graph(n), {}, {}};
    in.p = bass::collision_free_partition(in.g);
    bass::Rng rng(11);
    bass::Vector sp(in.p.count());
    for (int k = 0; k < sp.size(); ++k) sp(k) = bass::uniform01(rng);
    in.probs = bass::node_probabilities(in.p, sp, n);
    return in;
}

void BM_ExpectedGram(benchmark::State& state) {
    const auto in = gram_input(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bass::expected_laplacian_gram(in.g, in.p, in.probs));
}

void BM_ExpectedGramReference(benchmark::State& state) {
    const auto in = gram_input(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bass::reference::expected_laplacian_gram(in.g, in.p, in.probs));
}

void BM_MixingStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const bass::Matrix w = bass::Matrix::Constant(n, n, 1.0 / n);
    const bass::Matrix x = bass::Matrix::Random(n, 256);
    for (auto _ : state) benchmark::DoNotOptimize(bass::mixing_step(x, w));
}

void BM_MixingStepReference(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const bass::Matrix w = bass::Matrix::Constant(n, n, 1.0 / n);
    const bass::Matrix x = bass::Matrix::Random(n, 256);
    for (auto _ : state) benchmark::DoNotOptimize(bass::reference::mixing_step(x, w));
}

}  // namespace

BENCHMARK(BM_Betweenness)->Arg(50)->Arg(200);
BENCHMARK(BM_BetweennessReference)->Arg(50)->Arg(200);
BENCHMARK(BM_ExpectedGram)->Arg(30)->Arg(60);
BENCHMARK(BM_ExpectedGramReference)->Arg(30)->Arg(60);
BENCHMARK(BM_MixingStep)->Arg(50)->Arg(200);
BENCHMARK(BM_MixingStepReference)->Arg(50)->Arg(200);

BENCHMARK_MAIN();

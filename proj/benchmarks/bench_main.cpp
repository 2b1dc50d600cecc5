#include <benchmark/benchmark.h>

#include <vector>

#include "mribow/kmeans.hpp"
#include "mribow/patch.hpp"
#include "mribow/rng.hpp"
#include "mribow/svm.hpp"
#include "mribow/synth.hpp"

using namespace mribow;

namespace {

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t d,
                                               std::uint64_t seed) {
    Rng r(seed);
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        for (auto& v : p) v = r.next_double();
    }
    return pts;
}

void bm_kmeans(benchmark::State& state) {
    auto pts = random_points(static_cast<std::size_t>(state.range(0)), 256, 11);
    KMeansConfig cfg;
    cfg.k = 20;
    cfg.n_restarts = 1;
    cfg.seed = 12;
    for (auto _ : state) {
        auto res = kmeans(pts, cfg);
        benchmark::DoNotOptimize(res.wcss);
    }
}
BENCHMARK(bm_kmeans)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void bm_svm_train(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng r(21);
    Matrix x(n, 40);
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        int label = i < n / 2 ? -1 : 1;
        y.push_back(label);
        for (std::size_t j = 0; j < x.cols; ++j) {
            x.at(i, j) = 0.5 * label + r.next_symmetric();
        }
    }
    SvmSpec spec;
    spec.c = 10.0;
    spec.gamma = 1.0 / 40.0;
    for (auto _ : state) {
        auto model = svm_train(x, y, spec);
        benchmark::DoNotOptimize(model.bias);
    }
}
BENCHMARK(bm_svm_train)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_extract_patches(benchmark::State& state) {
    SynthConfig cfg;
    cfg.n_control = 4;
    cfg.n_mtbi = 4;
    cfg.dims = {static_cast<std::size_t>(state.range(0)), 48, 32};
    cfg.seed = 31;
    Dataset ds = generate(cfg);
    std::vector<FeatureKey> keys;
    for (FeatureKey k : ds.keys()) {
        if (is_bow_region(k.region)) keys.push_back(k);
    }
    for (auto _ : state) {
        PatchIndex idx = extract_all(ds, keys, PatchConfig{});
        benchmark::DoNotOptimize(idx.per_subject.size());
    }
}
BENCHMARK(bm_extract_patches)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

// Parallel kernels vs. their serial reference counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "ref/reference.hpp"
#include "xrad/radiomics.hpp"
#include "xrad/tensor.hpp"

using namespace xrad;

namespace {

QuantizedRoi make_roi(int side, int ng) {
    std::mt19937_64 rng(42);
    QuantizedRoi q;
    q.width = q.height = side;
    q.ng = ng;
    q.levels.resize(static_cast<size_t>(side) * side);
    std::uniform_int_distribution<int> lv(1, ng);
    for (auto& cell : q.levels) {
        cell = lv(rng);
        ++q.masked_count;
    }
    return q;
}

Tensor4 make_tensor(int b, int c, int h, int w, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1, 1);
    Tensor4 t(b, c, h, w);
    for (auto& v : t.data) v = dist(rng);
    return t;
}

void BM_glcm(benchmark::State& state) {
    QuantizedRoi q = make_roi(static_cast<int>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(glcm(q, 1, 0));
}

void BM_glcm_ref(benchmark::State& state) {
    QuantizedRoi q = make_roi(static_cast<int>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(ref::glcm_ref(q, 1, 0));
}

void BM_gldm(benchmark::State& state) {
    QuantizedRoi q = make_roi(static_cast<int>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(gldm(q, 1, 0));
}

void BM_gldm_ref(benchmark::State& state) {
    QuantizedRoi q = make_roi(static_cast<int>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(ref::gldm_ref(q, 1, 0));
}

void BM_ngtdm(benchmark::State& state) {
    QuantizedRoi q = make_roi(static_cast<int>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(ngtdm(q, 1));
}

void BM_ngtdm_ref(benchmark::State& state) {
    QuantizedRoi q = make_roi(static_cast<int>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(ref::ngtdm_ref(q, 1));
}

void BM_conv2d(benchmark::State& state) {
    int hw = static_cast<int>(state.range(0));
    Tensor4 x = make_tensor(2, 2, hw, hw, 1);
    Tensor4 k = make_tensor(1, 2, 7, 7, 2);
    std::vector<double> bias{0.1};
    for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, k, bias));
}

void BM_conv2d_ref(benchmark::State& state) {
    int hw = static_cast<int>(state.range(0));
    Tensor4 x = make_tensor(2, 2, hw, hw, 1);
    Tensor4 k = make_tensor(1, 2, 7, 7, 2);
    std::vector<double> bias{0.1};
    for (auto _ : state) benchmark::DoNotOptimize(ref::conv2d_ref(x, k, bias));
}

}  // namespace

BENCHMARK(BM_glcm)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_glcm_ref)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_gldm)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_gldm_ref)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_ngtdm)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_ngtdm_ref)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_conv2d)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK(BM_conv2d_ref)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_MAIN();

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include <benchmark/benchmark.h>

#include <random>

#include "wsdpa/wavelet.hpp"

namespace {

wsdpa::ImageTensor random_image(int h, int w, int c) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    wsdpa::ImageTensor img(h, w, c);
    for (auto& v : img.values) v = uni(rng);
    return img;
}

void BM_wavedec(benchmark::State& state) {
    const auto basis = wsdpa::WaveletBasis::from_name(
        state.range(1) == 0 ? "haar" : "db2");
    const int n = static_cast<int>(state.range(0));
    const wsdpa::ImageTensor img = random_image(n, n, 3);
    for (auto _ : state) {
        auto cv = wsdpa::wavedec(img, basis, 1);
        benchmark::DoNotOptimize(cv.values.data());
    }
    state.SetItemsProcessed(state.iterations() * img.size());
}

void BM_waverec(benchmark::State& state) {
    const auto basis = wsdpa::WaveletBasis::from_name("db2");
    const int n = static_cast<int>(state.range(0));
    const wsdpa::CoeffVector cv = wsdpa::wavedec(random_image(n, n, 3), basis, 1);
    for (auto _ : state) {
        auto img = wsdpa::waverec(cv, basis);
        benchmark::DoNotOptimize(img.values.data());
    }
    state.SetItemsProcessed(state.iterations() * cv.values.size());
}

} // namespace

BENCHMARK(BM_wavedec)->Args({32, 0})->Args({32, 1})->Args({128, 1});
BENCHMARK(BM_waverec)->Arg(32)->Arg(128);

BENCHMARK_MAIN();

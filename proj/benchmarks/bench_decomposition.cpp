// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include <benchmark/benchmark.h>

#include <random>

#include "wsdpa/analysis.hpp"
#include "wsdpa/hogsvd.hpp"
#include "wsdpa/selection.hpp"

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

void BM_rrqr_order(benchmark::State& state) {
    const Eigen::MatrixXd a = gaussian(state.range(0), state.range(1), 1);
    for (auto _ : state) {
        auto order = wsdpa::rrqr_order(a);
        benchmark::DoNotOptimize(order.perm.data());
    }
}

void BM_select_coefficients(benchmark::State& state) {
    const Eigen::Index n = state.range(0), m = state.range(1);
    std::vector<Eigen::MatrixXd> stacks = {gaussian(n, m, 2), gaussian(n, m, 3)};
    Eigen::MatrixXd stacked(2 * n, m);
    stacked << stacks[0], stacks[1];
    const wsdpa::PivotOrder order = wsdpa::rrqr_order(stacked);
    wsdpa::ScalingRecord rec;
    rec.alpha = 1.0;
    rec.row_sums = {Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n)};
    const wsdpa::CoeffLayout layout = wsdpa::CoeffLayout::compute(
        1, static_cast<int>(m), 1, wsdpa::WaveletBasis::from_name("identity"), 0);
    wsdpa::SelectionConfig cfg;
    cfg.tau = 1e6;
    for (auto _ : state) {
        auto tensor = wsdpa::select_coefficients(stacks, {"a", "b"}, order, cfg,
                                                 layout, rec);
        benchmark::DoNotOptimize(tensor.m);
    }
}

void BM_hogsvd(benchmark::State& state) {
    const Eigen::Index n = state.range(0), m = state.range(1);
    const std::vector<Eigen::MatrixXd> stacks = {gaussian(n, m, 4),
                                                 gaussian(n + 7, m, 5)};
    for (auto _ : state) {
        auto f = wsdpa::hogsvd(stacks, {"a", "b"});
        benchmark::DoNotOptimize(f.V.data());
    }
}

void BM_similarity_matrix(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const std::vector<Eigen::MatrixXd> stacks = {gaussian(n, 16, 6),
                                                 gaussian(n, 16, 7)};
    const wsdpa::HogsvdFactors f = wsdpa::hogsvd(stacks, {"a", "b"});
    for (auto _ : state) {
        auto sm = wsdpa::similarity_matrix(f, 0, 1.0);
        benchmark::DoNotOptimize(sm.w.data());
    }
}

} // namespace

BENCHMARK(BM_rrqr_order)->Args({400, 324})->Args({2000, 1024});
BENCHMARK(BM_select_coefficients)->Args({200, 64})->Args({400, 256});
BENCHMARK(BM_hogsvd)->Args({100, 40})->Args({400, 128});
BENCHMARK(BM_similarity_matrix)->Arg(200)->Arg(1000);

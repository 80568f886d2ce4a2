#include <benchmark/benchmark.h>

#include <gaussfisher/dgamma.hpp>
#include <gaussfisher/fock_oracle.hpp>
#include <gaussfisher/models.hpp>
#include <gaussfisher/sld.hpp>
#include <gaussfisher/symplectic.hpp>

#include <random>

using namespace gaussfisher;

namespace {

// Γ = S diag(ν, ν) Sᵀ with ν in [1.2, 3] and a seeded random S.
GaussianModelPoint random_point(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> nu_dist(1.2, 3.0), entry(-1.0, 1.0);
    Vector diag(2 * n);
    for (int k = 0; k < n; ++k) {
        diag(k) = diag(n + k) = nu_dist(rng);
    }
    const Matrix S = random_symplectic(n, seed, 1.0);
    Matrix X(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < X.size(); ++i) {
        X.data()[i] = entry(rng);
    }
    Vector dd(2 * n);
    for (Eigen::Index i = 0; i < dd.size(); ++i) {
        dd(i) = entry(rng);
    }
    return make_model_point(Vector::Zero(2 * n), S * diag.asDiagonal() * S.transpose(), dd,
                            0.5 * (X + X.transpose()));
}

void BM_Williamson(benchmark::State &state) {
    const auto p = random_point(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(williamson(p.gamma));
    }
}
BENCHMARK(BM_Williamson)->DenseRange(1, 6);

void BM_Pseudoinverse(benchmark::State &state) {
    const auto p = random_point(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dgamma_pseudoinverse_apply(p.gamma, p.dgamma));
    }
}
BENCHMARK(BM_Pseudoinverse)->DenseRange(1, 6);

void BM_Stein(benchmark::State &state) {
    const auto p = random_point(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stein_series_solve(p.gamma, p.dgamma));
    }
}
BENCHMARK(BM_Stein)->DenseRange(1, 6);

void BM_QfiGeneral(benchmark::State &state) {
    const auto p = random_point(static_cast<int>(state.range(0)), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qfi_general(p));
    }
}
BENCHMARK(BM_QfiGeneral)->DenseRange(1, 6);

void BM_FockState(benchmark::State &state) {
    const auto p = builtin_family("phase_squeezed", {{"r", 0.5}, {"nu", 1.5}}).evaluate(0.3);
    const int cutoff = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_state(p, cutoff));
    }
}
BENCHMARK(BM_FockState)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();

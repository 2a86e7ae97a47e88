#include <benchmark/benchmark.h>

#include <random>

#include "rpslab/frame.hpp"
#include "rpslab/grid.hpp"
#include "rpslab/kernels.hpp"

using namespace rps;
namespace ks = rps::kernels;

namespace {

CVec data(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    return v;
}

RVec phases(std::size_t n) {
    RVec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1e-3 * double(i % 977);
    return v;
}

template <bool Omp>
void BM_phase(benchmark::State& st) {
    const auto n = std::size_t(st.range(0));
    CVec z = data(n);
    const RVec th = phases(n);
    for (auto _ : st) {
        if constexpr (Omp) ks::omp::phase(z.data(), th.data(), 0.01, n);
        else ks::serial::phase(z.data(), th.data(), 0.01, n);
        benchmark::DoNotOptimize(z.data());
    }
    st.SetItemsProcessed(st.iterations() * std::int64_t(n));
}

template <bool Omp>
void BM_norm2(benchmark::State& st) {
    const auto n = std::size_t(st.range(0));
    const CVec z = data(n);
    for (auto _ : st) benchmark::DoNotOptimize(Omp ? ks::omp::norm2(z.data(), n) : ks::serial::norm2(z.data(), n));
    st.SetItemsProcessed(st.iterations() * std::int64_t(n));
}

template <bool Omp>
void BM_dot(benchmark::State& st) {
    const auto n = std::size_t(st.range(0));
    const CVec a = data(n), b = data(n);
    for (auto _ : st) benchmark::DoNotOptimize(Omp ? ks::omp::dot(a.data(), b.data(), n) : ks::serial::dot(a.data(), b.data(), n));
    st.SetItemsProcessed(st.iterations() * std::int64_t(n));
}

template <bool Omp>
void BM_increment_norms(benchmark::State& st) {
    const auto n = std::size_t(st.range(0));
    const CVec e = data(n);
    RVec out(65);
    for (auto _ : st) {
        if constexpr (Omp) ks::omp::increment_norms(e.data(), n, 64, out.data());
        else ks::serial::increment_norms(e.data(), n, 64, out.data());
        benchmark::DoNotOptimize(out.data());
    }
}

// one full free step at 64^3 through the dispatching front end
template <bool Omp>
void BM_free_step_64(benchmark::State& st) {
    ks::set_backend(Omp ? ks::Backend::omp : ks::Backend::serial);
    const Grid g(3, 64, 10.0);
    CVec z = data(g.size());
    for (auto _ : st) {
        detail::free_propagate_inplace(g, z.data(), 1e-3);
        benchmark::DoNotOptimize(z.data());
    }
    ks::set_backend(ks::Backend::omp);
}

} // namespace

BENCHMARK(BM_phase<false>)->Arg(1 << 18)->Arg(1 << 21);
BENCHMARK(BM_phase<true>)->Arg(1 << 18)->Arg(1 << 21);
BENCHMARK(BM_norm2<false>)->Arg(1 << 18)->Arg(1 << 21);
BENCHMARK(BM_norm2<true>)->Arg(1 << 18)->Arg(1 << 21);
BENCHMARK(BM_dot<false>)->Arg(1 << 18);
BENCHMARK(BM_dot<true>)->Arg(1 << 18);
BENCHMARK(BM_increment_norms<false>)->Arg(1 << 14);
BENCHMARK(BM_increment_norms<true>)->Arg(1 << 14);
BENCHMARK(BM_free_step_64<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_free_step_64<true>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

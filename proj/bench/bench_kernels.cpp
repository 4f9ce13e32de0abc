// Serial reference vs OpenMP kernels at the full 8 x 12 x 9 scale.

#include <benchmark/benchmark.h>

#include "bilimo/dictionary.hpp"
#include "bilimo/kernels.hpp"
#include "bilimo/model.hpp"

namespace {

const bilimo::SteeringDictionary& dict() {
    static const bilimo::SteeringDictionary d(bilimo::make_ula_config(8, 12, 1e6, 9e-6, 10e9), {.dense = false});
    return d;
}

Eigen::VectorXcd random_vec(Eigen::Index n) {
    bilimo::Rng rng(7);
    Eigen::VectorXcd v(n);
    for (auto& x : v) x = bilimo::complex_normal(rng, 1.0);
    return v;
}

template <bool Parallel>
void BM_KronApply(benchmark::State& st) {
    const auto& d = dict();
    const Eigen::VectorXcd a = random_vec(d.cols());
    Eigen::VectorXcd out;
    for (auto _ : st) {
        if constexpr (Parallel)
            bilimo::kernels::kron_apply(d.U(), d.V(), a, out);
        else
            bilimo::kernels::serial::kron_apply(d.U(), d.V(), a, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_KronAdjoint(benchmark::State& st) {
    const auto& d = dict();
    const Eigen::VectorXcd c = random_vec(d.rows());
    Eigen::VectorXcd out;
    for (auto _ : st) {
        if constexpr (Parallel)
            bilimo::kernels::kron_adjoint(d.U(), d.V(), c, out);
        else
            bilimo::kernels::serial::kron_adjoint(d.U(), d.V(), c, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_FillDictionary(benchmark::State& st) {
    const auto& d = dict();
    Eigen::MatrixXcd phi;
    for (auto _ : st) {
        if constexpr (Parallel)
            bilimo::kernels::fill_dictionary(d.U(), d.V(), phi);
        else
            bilimo::kernels::serial::fill_dictionary(d.U(), d.V(), phi);
        benchmark::DoNotOptimize(phi.data());
    }
}

template <bool Parallel>
void BM_Coherence(benchmark::State& st) {
    // 3 x 4 x 3 dictionary: 36 x 108
    const bilimo::SteeringDictionary small(bilimo::make_ula_config(3, 4, 1e6, 3e-6, 10e9));
    for (auto _ : st) {
        double mu = Parallel ? bilimo::kernels::max_column_coherence(small.phi())
                             : bilimo::kernels::serial::max_column_coherence(small.phi());
        benchmark::DoNotOptimize(mu);
    }
}

}  // namespace

BENCHMARK(BM_KronApply<false>)->Name("kron_apply/serial");
BENCHMARK(BM_KronApply<true>)->Name("kron_apply/openmp");
BENCHMARK(BM_KronAdjoint<false>)->Name("kron_adjoint/serial");
BENCHMARK(BM_KronAdjoint<true>)->Name("kron_adjoint/openmp");
BENCHMARK(BM_FillDictionary<false>)->Name("fill_dictionary/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FillDictionary<true>)->Name("fill_dictionary/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Coherence<false>)->Name("coherence/serial");
BENCHMARK(BM_Coherence<true>)->Name("coherence/openmp");

BENCHMARK_MAIN();

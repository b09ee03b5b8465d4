#include <benchmark/benchmark.h>

#include "stf/corpus/generators.hpp"
#include "stf/ml/automl.hpp"
#include "stf/ml/dataset.hpp"
#include "stf/ml/kernels.hpp"
#include "stf/ml/rng.hpp"

namespace {

using namespace stf;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.normal();
    return m;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform();
    return v;
}

template <Matrix (*Gram)(const Matrix&)>
void BM_Gram(benchmark::State& state) {
    const Matrix x = random_matrix(static_cast<std::size_t>(state.range(0)), 24, 1);
    for (auto _ : state) benchmark::DoNotOptimize(Gram(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Matrix (*Dist)(const Matrix&, const Matrix&)>
void BM_SqDistances(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix q = random_matrix(n / 4, 8, 2);
    const Matrix t = random_matrix(n, 8, 3);
    for (auto _ : state) benchmark::DoNotOptimize(Dist(q, t));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.rows * t.rows));
}

template <std::vector<double> (*Grad)(const Matrix&, const std::vector<double>&, const std::vector<double>&)>
void BM_LogisticGradient(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix x = random_matrix(n, 16, 4);
    std::vector<double> y = random_vector(n, 5);
    for (double& v : y) v = v < 0.5 ? 0.0 : 1.0;
    const std::vector<double> w = random_vector(17, 6);
    for (auto _ : state) benchmark::DoNotOptimize(Grad(x, y, w));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AutoMlPingpong(benchmark::State& state) {
    kernels::set_backend(state.range(0) ? kernels::Backend::OpenMP : kernels::Backend::Serial);
    const Dataset ds = parse_csv(gen_pingpong(1, 2000), {{"attacker", ColumnType::Categorical}});
    PipelineSpec spec;
    spec.features = {{"ip_block", ColumnType::Numeric}, {"hour", ColumnType::Numeric}};
    spec.labels = {{"attacker", ColumnType::Categorical}};
    spec.task = Task::Classification;
    spec.scaling = Scaling::ZScore;
    const PreparedData data = preprocess(ds, spec);
    for (auto _ : state) benchmark::DoNotOptimize(automl_search(data, "accuracy", 5, kDefaultBudget, 1));
    kernels::set_backend(kernels::openmp_available() ? kernels::Backend::OpenMP : kernels::Backend::Serial);
}

}  // namespace

BENCHMARK(BM_Gram<kernels::serial::gram>)->Name("gram/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_Gram<kernels::omp::gram>)->Name("gram/omp")->Arg(1000)->Arg(10000);
BENCHMARK(BM_SqDistances<kernels::serial::sq_distances>)->Name("sq_distances/serial")->Arg(1000)->Arg(4000);
BENCHMARK(BM_SqDistances<kernels::omp::sq_distances>)->Name("sq_distances/omp")->Arg(1000)->Arg(4000);
BENCHMARK(BM_LogisticGradient<kernels::serial::logistic_gradient>)->Name("logistic_gradient/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_LogisticGradient<kernels::omp::logistic_gradient>)->Name("logistic_gradient/omp")->Arg(1000)->Arg(10000);
BENCHMARK(BM_AutoMlPingpong)->Name("automl_pingpong")->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

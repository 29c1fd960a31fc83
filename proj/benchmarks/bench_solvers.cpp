#include "crq/canonical.hpp"
#include "crq/pipeline.hpp"
#include "crq/quantile.hpp"
#include "crq/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

Eigen::MatrixXd design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = j == 0 ? 1.0 : z(rng);
    return x;
}

void BM_rq_fit(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    const auto n = state.range(0);
    crq::RegressionProblem prob;
    prob.design = design(rng, n, 5);
    prob.response = prob.design * Eigen::VectorXd::LinSpaced(5, 1.0, 2.0);
    for (Eigen::Index i = 0; i < n; ++i) prob.response(i) += z(rng);
    for (auto _ : state) benchmark::DoNotOptimize(crq::rq_fit(prob, crq::QuantileLevel(0.5)));
}
BENCHMARK(BM_rq_fit)->Arg(50)->Arg(100)->Arg(200)->Arg(400);

void BM_canonical_simplex(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    const auto n = state.range(0);
    crq::CanonicalProblem prob;
    prob.design = design(rng, n, 26);
    prob.responses.resize(n, 5);
    const Eigen::VectorXd common = prob.design.col(1) + prob.design.col(2);
    for (Eigen::Index j = 0; j < 5; ++j)
        for (Eigen::Index i = 0; i < n; ++i) prob.responses(i, j) = common(i) + z(rng);
    for (auto _ : state) benchmark::DoNotOptimize(crq::canonical_rq_simplex(prob));
}
BENCHMARK(BM_canonical_simplex)->Arg(100)->Arg(200);

void BM_analyze_window(benchmark::State& state) {
    crq::SyntheticSpec spec;
    spec.n_companies = static_cast<std::size_t>(state.range(0));
    const auto panel = crq::gen_synthetic(spec, 3);
    const auto window = crq::WindowSpec::standard(spec.first_year);
    for (auto _ : state)
        benchmark::DoNotOptimize(crq::analyze_window(panel, window, crq::AggregationConfig{}, crq::QuantileLevel(0.5)));
}
BENCHMARK(BM_analyze_window)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <jkp/closed_form.hpp>
#include <jkp/conformal.hpp>
#include <jkp/mlp.hpp>
#include <jkp/numeric.hpp>
#include <jkp/scenarios.hpp>

#include <vector>

using namespace jkp;

namespace {

Dataset linear_training(std::size_t n) {
    LinearScenario scenario;
    scenario.n_train = n;
    return scenario.generate(TestLaw::Iid, 0, RngStream(1)).train;
}

void BM_ClosedFormScores(benchmark::State& state) {
    const auto data = linear_training(static_cast<std::size_t>(state.range(0)));
    const FeatureMap map(FeatureKind::FullLinear, 2);
    const Vector x_new = data.covariate_mean();
    for (auto _ : state) benchmark::DoNotOptimize(closed_form_scores(map, data, x_new).scores);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClosedFormScores)->RangeMultiplier(2)->Range(50, 1600)->Complexity();

void BM_RefitScores(benchmark::State& state) {
    const auto data = linear_training(static_cast<std::size_t>(state.range(0)));
    const OlsLearner learner(FeatureMap(FeatureKind::FullLinear, 2), "mu0");
    const Vector x_new = data.covariate_mean();
    for (auto _ : state) {
        benchmark::DoNotOptimize(conformal_scores(build_loo_ensemble(data, learner, RngStream(2)), x_new).scores());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RefitScores)->RangeMultiplier(2)->Range(50, 800)->Complexity();

void BM_OrderStatQuantile(benchmark::State& state) {
    RngStream rng(3);
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    for (auto& v : values) v = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(order_stat_quantile(values, 0.025));
}
BENCHMARK(BM_OrderStatQuantile)->Range(64, 1 << 16);

void BM_MlpSingleRestart(benchmark::State& state) {
    NnScenario scenario;
    scenario.n_train = static_cast<std::size_t>(state.range(0));
    const auto data = scenario.generate(TestLaw::Iid, 0, RngStream(4)).train;
    for (auto _ : state) {
        RngStream rng(5);
        benchmark::DoNotOptimize(
            train_mlp(MlpArchitecture::true_network(), data, TrainerConfig::single_restart(), rng).loss);
    }
}
BENCHMARK(BM_MlpSingleRestart)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_MlpGradientDeep(benchmark::State& state) {
    NnScenario scenario;
    scenario.n_train = 100;
    const auto data = scenario.generate(TestLaw::Iid, 0, RngStream(6)).train;
    std::vector<std::size_t> widths{3};
    for (int k = 0; k < state.range(0); ++k) widths.push_back(20);
    widths.push_back(1);
    const MlpArchitecture arch{widths};
    RngStream rng(7);
    MlpObjective objective(arch, data);
    const Vector flat = init_mlp_params(arch, rng).flat();
    Vector grad(flat.size());
    for (auto _ : state) benchmark::DoNotOptimize(objective.total_loss_and_gradient(flat, grad));
}
BENCHMARK(BM_MlpGradientDeep)->Arg(5)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();

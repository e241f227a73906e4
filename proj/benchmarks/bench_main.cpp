#include <benchmark/benchmark.h>

#include <random>

#include "alcnn/pipeline.hpp"

namespace {

using namespace alcnn;

const SyntheticCity& city() {
  static const SyntheticCity c = generate_city(SyntheticCitySpec{}, 1);
  return c;
}

void BM_FeatureMatrix(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_feature_matrix(city().geo, city().grid));
}
BENCHMARK(BM_FeatureMatrix)->Unit(benchmark::kMillisecond);

void BM_MinePatterns(benchmark::State& state) {
  const auto& c = city();
  const auto records = sample_records(c.grid, c.planted, c.intensity, c.spec.days, c.spec.first_day, 7);
  AggregateOptions agg;
  agg.day_range = std::pair{c.spec.first_day, c.spec.first_day + c.spec.days - 1};
  const auto demands = aggregate_demands(records, c.grid, agg);
  for (auto _ : state) benchmark::DoNotOptimize(mine_patterns(demands, daubechies2(), {}));
}
BENCHMARK(BM_MinePatterns)->Unit(benchmark::kMillisecond);

void BM_JointPca(benchmark::State& state) {
  const auto pair = synthesize_pair(SyntheticCitySpec{}, 1);
  const auto fs = build_feature_matrix(pair.source.geo, pair.source.grid);
  const auto ft = build_feature_matrix(pair.target.geo, pair.target.grid);
  for (auto _ : state) benchmark::DoNotOptimize(fit_joint(fs, ft, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_JointPca)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  ModelShape shape;
  shape.latent_dim = 4;
  const auto params = init_params(shape, 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Eigen::MatrixXd latent(400, 4);
  for (Eigen::Index i = 0; i < latent.size(); ++i) latent.data()[i] = n(rng);
  const auto tensor = LatentFeatureTensor::from_cell_rows(latent, 20, 20);
  for (auto _ : state) benchmark::DoNotOptimize(infer_city(params, tensor));
  state.SetItemsProcessed(state.iterations() * 400);
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

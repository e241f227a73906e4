#include "alcnn/pipeline.hpp"

#include "alcnn/error.hpp"

namespace alcnn {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ExperimentSeeds experiment_seeds(std::uint64_t seed) {
  return {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3), derive_seed(seed, 4), derive_seed(seed, 5)};
}

SyntheticPair synthesize_pair(const SyntheticCitySpec& spec, std::uint64_t seed) {
  const auto s = experiment_seeds(seed);
  return {generate_city(spec, s.source_city), generate_city(spec, s.target_city)};
}

CityBundle prepare_synthetic(const SyntheticCity& city, std::uint64_t sample_seed, const MiningOptions& mining,
                             const std::string& wavelet, bool with_demand) {
  CityBundle b;
  b.grid = city.grid;
  b.features = build_feature_matrix(city.geo, city.grid, city.spec.features);
  b.planted = city.planted;
  if (with_demand) {
    const auto records =
        sample_records(city.grid, city.planted, city.intensity, city.spec.days, city.spec.first_day, sample_seed);
    AggregateOptions agg;
    agg.slots_per_day = city.spec.slots;
    agg.day_range = std::pair{city.spec.first_day, city.spec.first_day + city.spec.days - 1};
    b.demands = aggregate_demands(records, city.grid, agg);
    b.mined = mine_patterns(b.demands, wavelet_by_name(wavelet), mining);
  }
  return b;
}

PatternMap training_targets(const CityBundle& source, bool accepted_only) {
  return pattern_map(source.mined, accepted_only);
}

Eigen::MatrixXd latent_rows(const Eigen::MatrixXd& latent, int grid_cols, const PatternMap& cells) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(cells.size()), latent.cols());
  Eigen::Index r = 0;
  for (const auto& [cell, pattern] : cells) {
    const Eigen::Index flat = static_cast<Eigen::Index>(cell.row) * grid_cols + cell.col;
    if (cell.row < 0 || cell.col < 0 || cell.col >= grid_cols || flat >= latent.rows())
      throw InvalidInput("pattern cell " + to_key(cell) + " lies outside the feature grid");
    out.row(r++) = latent.row(flat);
  }
  return out;
}

namespace {

void check_latent(const Eigen::MatrixXd& latent, int grid_rows, int grid_cols) {
  if (latent.rows() != static_cast<Eigen::Index>(grid_rows) * grid_cols)
    throw InvalidInput("latent matrix has " + std::to_string(latent.rows()) + " rows, grid has " +
                       std::to_string(grid_rows * grid_cols) + " cells");
}

}  // namespace

PatternMap predict_ridge(const RidgePatternModel& model, const Eigen::MatrixXd& target_latent, int grid_rows,
                         int grid_cols) {
  check_latent(target_latent, grid_rows, grid_cols);
  PatternMap out;
  for (Eigen::Index c = 0; c < target_latent.rows(); ++c) {
    const Eigen::RowVectorXd x = target_latent.row(c);
    out.emplace(CellIndex{static_cast<int>(c / grid_cols), static_cast<int>(c % grid_cols)},
                ridge_predict_pattern(model, std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))));
  }
  return out;
}

PatternMap predict_knn(const Eigen::MatrixXd& source_rows, std::span<const ProbVector> source_patterns,
                       const Eigen::MatrixXd& target_latent, int grid_rows, int grid_cols, int K) {
  check_latent(target_latent, grid_rows, grid_cols);
  PatternMap out;
  for (Eigen::Index c = 0; c < target_latent.rows(); ++c) {
    const Eigen::RowVectorXd x = target_latent.row(c);
    out.emplace(CellIndex{static_cast<int>(c / grid_cols), static_cast<int>(c % grid_cols)},
                knn_predict(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), source_rows,
                            source_patterns, K)
                    .pattern);
  }
  return out;
}

FittedTransfer fit_transfer(const FeatureMatrix& source, const FeatureMatrix& target, const PatternMap& targets,
                            const TransferConfig& cfg, bool with_alcnn, const EpochCallback& on_epoch) {
  if (targets.size() < 2) throw InsufficientData("source city has fewer than 2 usable patterns");
  FittedTransfer out;
  out.pca = fit_joint(source, target, cfg.latent_dim);
  out.train_cells = targets.size();

  TrainConfig tc = cfg.train;
  tc.shape.latent_dim = cfg.latent_dim;
  if (with_alcnn) {
    const auto tensor = LatentFeatureTensor::from_cell_rows(out.pca.latent_source, source.grid_rows(), source.grid_cols());
    const auto instances = build_instances(tensor, targets, tc.shape.scales);
    out.training = train(instances, tc, on_epoch);
  }
  out.source_rows = latent_rows(out.pca.latent_source, source.grid_cols(), targets);
  for (const auto& [cell, p] : targets) out.source_patterns.push_back(p);
  out.ridge = ridge_fit_patterns(out.source_rows, out.source_patterns, cfg.ridge_lambda, tc.shape.wavelet,
                                 tc.shape.output_epsilon);
  return out;
}

TransferOutcome run_transfer(const CityBundle& source, const CityBundle& target, const TransferConfig& cfg,
                             const EpochCallback& on_epoch) {
  if (target.planted.empty()) throw InvalidInput("target city has no ground-truth patterns to evaluate against");
  TransferOutcome out;
  out.fit = fit_transfer(source.features, target.features, training_targets(source, cfg.accepted_only), cfg, true,
                         on_epoch);
  const int rows = target.grid.rows(), cols = target.grid.cols();
  const auto tensor = LatentFeatureTensor::from_cell_rows(out.fit.pca.latent_target, rows, cols);
  auto inferred = infer_city(out.fit.training->params, tensor);
  out.alcnn = std::move(inferred.patterns);
  out.attention = std::move(inferred.attention);
  out.lr = predict_ridge(out.fit.ridge, out.fit.pca.latent_target, rows, cols);
  out.knn = predict_knn(out.fit.source_rows, out.fit.source_patterns, out.fit.pca.latent_target, rows, cols,
                        cfg.knn_k);

  for (const auto& [name, map] : {std::pair<std::string, const PatternMap*>{"ALCNN", &out.alcnn},
                                  {"LR", &out.lr},
                                  {"KNN", &out.knn}}) {
    const auto report = evaluate(*map, target.planted, cfg.train.direction);
    out.scores.push_back({name, report.klmse, report.compared});
  }
  return out;
}

}  // namespace alcnn

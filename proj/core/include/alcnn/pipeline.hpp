#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alcnn/baselines.hpp"
#include "alcnn/city_synth.hpp"
#include "alcnn/copca.hpp"
#include "alcnn/dwt_pattern.hpp"
#include "alcnn/inference.hpp"
#include "alcnn/trainer.hpp"

namespace alcnn {

// Independent stream `stream` of a base seed (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Seed streams of one experiment: city layouts and trip sampling.
struct ExperimentSeeds {
  std::uint64_t source_city, target_city, source_trips, target_trips, training;
};
ExperimentSeeds experiment_seeds(std::uint64_t seed);

struct SyntheticPair {
  SyntheticCity source;
  SyntheticCity target;
};
SyntheticPair synthesize_pair(const SyntheticCitySpec& spec, std::uint64_t seed);

// Everything the transfer experiment needs from one city.
struct CityBundle {
  GridMap grid{BoundingBox{{0.0, 0.0}, {1.0, 1.0}}, 1, 1};
  FeatureMatrix features;
  DemandSet demands;                          // empty for a city without bike data
  std::map<CellIndex, MinedPattern> mined;    // empty likewise
  PatternMap planted;                         // synthetic ground truth
};

// Samples the synthetic city's trips, aggregates, mines and extracts
// features. `with_demand` false skips sampling (a target city).
CityBundle prepare_synthetic(const SyntheticCity& city, std::uint64_t sample_seed, const MiningOptions& mining,
                             const std::string& wavelet, bool with_demand = true);

struct TransferConfig {
  int latent_dim = 16;
  TrainConfig train;  // train.shape.latent_dim is overwritten by latent_dim
  double ridge_lambda = 0.1;
  int knn_k = 10;
  bool accepted_only = true;  // train only on cells whose pattern passed the threshold
};

struct MethodScore {
  std::string method;
  double klmse = 0.0;
  std::size_t cells = 0;
};

// Everything fitted on the source city.
struct FittedTransfer {
  JointFit pca;
  std::optional<TrainResult> training;  // absent when the network is skipped
  RidgePatternModel ridge;
  Eigen::MatrixXd source_rows;  // latent rows of the training cells
  std::vector<ProbVector> source_patterns;
  std::size_t train_cells = 0;
};

// Joint coPCA of both cities, then ALCNN (unless `with_alcnn` is false)
// and ridge on the source cells that have a target pattern.
FittedTransfer fit_transfer(const FeatureMatrix& source, const FeatureMatrix& target, const PatternMap& targets,
                            const TransferConfig& cfg, bool with_alcnn = true, const EpochCallback& on_epoch = {});

struct TransferOutcome {
  FittedTransfer fit;
  PatternMap alcnn;
  PatternMap lr;
  PatternMap knn;
  std::map<CellIndex, std::vector<double>> attention;
  std::vector<MethodScore> scores;  // ALCNN, LR, KNN against target.planted
};

// Source training targets: accepted (or all) mined patterns.
PatternMap training_targets(const CityBundle& source, bool accepted_only);

// Latent rows of the cells in `cells`, in map order; latent rows are in
// row-major cell order of a grid with `grid_cols` columns.
Eigen::MatrixXd latent_rows(const Eigen::MatrixXd& latent, int grid_cols, const PatternMap& cells);

// fit_transfer, inference on the target, and evaluation of all three
// methods against the target's planted patterns.
TransferOutcome run_transfer(const CityBundle& source, const CityBundle& target, const TransferConfig& cfg,
                             const EpochCallback& on_epoch = {});

// Predictions for every cell of a grid_rows x grid_cols target.
PatternMap predict_ridge(const RidgePatternModel& model, const Eigen::MatrixXd& target_latent, int grid_rows,
                         int grid_cols);
PatternMap predict_knn(const Eigen::MatrixXd& source_rows, std::span<const ProbVector> source_patterns,
                       const Eigen::MatrixXd& target_latent, int grid_rows, int grid_cols, int K);

}  // namespace alcnn

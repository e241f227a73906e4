#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "alcnn/model.hpp"

namespace alcnn {

struct TrainConfig {
  ModelShape shape;
  double learning_rate = 1e-3;
  int batch_size = 128;
  double dropout = 0.1;
  int patience = 50;
  int max_epochs = 2000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double batch_norm_momentum = 0.1;
  // Fraction of instances held out for early stopping. Zero validates on
  // the training instances themselves.
  double validation_fraction = 0.2;
  KlDirection direction = KlDirection::kTargetToPrediction;
  // Start the output bias at the coefficients of the mean training target.
  bool init_bias_from_targets = true;
  std::uint64_t rng_seed = 1;
};

void validate(const TrainConfig& cfg);

struct EpochLog {
  int epoch = 0;
  double train_klmse = 0.0;  // sample-weighted mean of mini-batch losses
  double val_klmse = 0.0;    // eval mode
  double learning_rate = 0.0;
  double elapsed_ms = 0.0;
};

struct TrainResult {
  ModelParams params;  // best validation epoch
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_klmse = 0.0;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
};

// Optional per-epoch observer, e.g. for progress output.
using EpochCallback = std::function<void(const EpochLog&)>;

TrainResult train(std::span<const TrainingInstance> instances, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Eval-mode KLMSE over a set of instances.
double evaluate_klmse(const ModelParams& params, std::span<const TrainingInstance> instances,
                      KlDirection direction = KlDirection::kTargetToPrediction);

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& like, double learning_rate, double beta1, double beta2, double epsilon);

  void step(ModelParams& params, ModelParams& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  long t_ = 0;
  ModelParams m_;
  ModelParams v_;
};

}  // namespace alcnn

#include "alcnn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "alcnn/error.hpp"
#include "alcnn/random.hpp"

namespace alcnn {

void validate(const TrainConfig& cfg) {
  validate(cfg.shape);
  if (!(cfg.learning_rate > 0.0)) throw InvalidInput("learning rate must be > 0");
  if (cfg.batch_size < 1) throw InvalidInput("batch size must be >= 1");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) throw InvalidInput("dropout must lie in [0, 1)");
  if (cfg.patience < 1 || cfg.max_epochs < 1) throw InvalidInput("patience and max epochs must be >= 1");
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) || !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0))
    throw InvalidInput("Adam betas must lie in [0, 1)");
  if (!(cfg.adam_epsilon > 0.0)) throw InvalidInput("Adam epsilon must be > 0");
  if (!(cfg.batch_norm_momentum > 0.0 && cfg.batch_norm_momentum <= 1.0))
    throw InvalidInput("batch-norm momentum must lie in (0, 1]");
  if (!(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 1.0))
    throw InvalidInput("validation fraction must lie in [0, 1)");
}

AdamOptimizer::AdamOptimizer(const ModelParams& like, double learning_rate, double beta1, double beta2,
                             double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(zeros_like(like)),
      v_(zeros_like(like)) {}

void AdamOptimizer::step(ModelParams& params, ModelParams& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto p = learnable_tensors(params);
  auto g = learnable_tensors(grads);
  auto m = learnable_tensors(m_);
  auto v = learnable_tensors(v_);
  if (p.size() != g.size() || p.size() != m.size()) throw InvalidInput("gradient layout does not match parameters");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].values.size() != g[i].values.size()) throw InvalidInput("gradient tensor " + g[i].name + " has wrong size");
    for (std::size_t j = 0; j < p[i].values.size(); ++j) {
      const double gj = g[i].values[j];
      double& mj = m[i].values[j];
      double& vj = v[i].values[j];
      mj = beta1_ * mj + (1.0 - beta1_) * gj;
      vj = beta2_ * vj + (1.0 - beta2_) * gj * gj;
      p[i].values[j] -= lr_ * (mj / c1) / (std::sqrt(vj / c2) + epsilon_);
    }
  }
}

namespace {

RowMatrix target_matrix(std::span<const TrainingInstance> all, std::span<const std::size_t> idx, int k) {
  RowMatrix t(static_cast<Eigen::Index>(idx.size()), k);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& target = all[idx[r]].target;
    if (target.size() != static_cast<std::size_t>(k))
      throw InvalidInput("target length " + std::to_string(target.size()) + " does not match slots " + std::to_string(k));
    for (int s = 0; s < k; ++s) t(static_cast<Eigen::Index>(r), s) = target[static_cast<std::size_t>(s)];
  }
  return t;
}

std::vector<const ModelInput*> inputs_of(std::span<const TrainingInstance> all, std::span<const std::size_t> idx) {
  std::vector<const ModelInput*> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(&all[i].input);
  return out;
}

double eval_klmse(const ModelParams& params, std::span<const TrainingInstance> all, std::span<const std::size_t> idx,
                  KlDirection direction) {
  const auto inputs = inputs_of(all, idx);
  const auto result = forward(params, inputs, {});
  return klmse_loss(result.prediction, target_matrix(all, idx, params.shape.slots), direction);
}

// Batches of `size`, a trailing singleton folded into the previous batch
// (batch statistics of one sample are degenerate).
std::vector<std::span<const std::size_t>> batches(std::span<const std::size_t> order, int size) {
  std::vector<std::span<const std::size_t>> out;
  const auto bs = static_cast<std::size_t>(size);
  for (std::size_t start = 0; start < order.size(); start += bs) {
    const std::size_t len = std::min(bs, order.size() - start);
    if (len == 1 && !out.empty()) {
      out.back() = order.subspan(start - out.back().size(), out.back().size() + 1);
      break;
    }
    out.push_back(order.subspan(start, len));
  }
  return out;
}

}  // namespace

double evaluate_klmse(const ModelParams& params, std::span<const TrainingInstance> instances, KlDirection direction) {
  std::vector<std::size_t> idx(instances.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return eval_klmse(params, instances, idx, direction);
}

TrainResult train(std::span<const TrainingInstance> instances, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate(cfg);
  if (instances.empty()) throw InvalidInput("no training instances");
  const auto start = std::chrono::steady_clock::now();

  std::mt19937_64 split_rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  deterministic_shuffle(order.begin(), order.end(), split_rng);

  std::vector<std::size_t> train_idx, val_idx;
  if (cfg.validation_fraction > 0.0) {
    const auto n_val = static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(order.size())));
    if (n_val == 0 || n_val >= order.size())
      throw InvalidInput("validation split of " + std::to_string(order.size()) + " instances leaves an empty side");
    val_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    train_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  } else {
    train_idx = order;
    val_idx = order;
  }

  TrainResult result;
  result.train_count = train_idx.size();
  result.validation_count = val_idx.size();

  std::mt19937_64 rng(cfg.rng_seed);
  ModelParams params = init_params(cfg.shape, cfg.rng_seed);
  if (cfg.init_bias_from_targets) {
    std::vector<double> mean(static_cast<std::size_t>(cfg.shape.slots), 0.0);
    for (std::size_t i : train_idx)
      for (std::size_t s = 0; s < mean.size(); ++s) mean[s] += instances[i].target[s];
    for (double& v : mean) v /= static_cast<double>(train_idx.size());
    const auto coef = pattern_to_coefficients(ProbVector(normalize(std::span<const double>(mean), 1e-12)), cfg.shape.wavelet);
    for (std::size_t j = 0; j < coef.size(); ++j) params.out_bias(static_cast<Eigen::Index>(j)) = coef[j];
  }

  AdamOptimizer adam(params, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  result.params = params;
  result.best_val_klmse = eval_klmse(params, instances, val_idx, cfg.direction);
  if (!std::isfinite(result.best_val_klmse)) throw NumericError("non-finite validation loss at initialisation");

  int since_best = 0;
  ForwardCache cache;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    deterministic_shuffle(train_idx.begin(), train_idx.end(), rng);
    double loss_sum = 0.0;
    for (auto batch : batches(train_idx, cfg.batch_size)) {
      const auto inputs = inputs_of(instances, batch);
      const auto targets = target_matrix(instances, batch, cfg.shape.slots);
      const auto out = forward(params, inputs, {Mode::kTrain, cfg.dropout, &rng}, &cache);
      RowMatrix grad;
      const double loss = klmse_loss(out.prediction, targets, cfg.direction, &grad);
      if (!std::isfinite(loss)) throw NumericError("non-finite training loss in epoch " + std::to_string(epoch));
      loss_sum += loss * static_cast<double>(batch.size());
      ModelParams g = backward(params, cache, grad);
      adam.step(params, g);
      update_running_stats(params, cache, cfg.batch_norm_momentum);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_klmse = loss_sum / static_cast<double>(train_idx.size());
    entry.val_klmse = eval_klmse(params, instances, val_idx, cfg.direction);
    entry.learning_rate = cfg.learning_rate;
    entry.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(entry.val_klmse)) throw NumericError("non-finite validation loss in epoch " + std::to_string(epoch));
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (entry.val_klmse < result.best_val_klmse) {
      result.best_val_klmse = entry.val_klmse;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace alcnn

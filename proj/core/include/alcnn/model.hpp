#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "alcnn/geo_grid.hpp"

namespace alcnn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

// n x m x d' latent features, cell-major then feature.
class LatentFeatureTensor {
 public:
  LatentFeatureTensor() = default;
  LatentFeatureTensor(int rows, int cols, int depth);

  // `latent` has one row per cell in row-major (i, j) order.
  static LatentFeatureTensor from_cell_rows(const Eigen::MatrixXd& latent, int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int depth() const { return depth_; }

  double at(int i, int j, int f) const { return values_[offset(i, j) + f]; }
  double& at(int i, int j, int f) { return values_[offset(i, j) + f]; }
  std::span<const double> cell(int i, int j) const {
    return {values_.data() + offset(i, j), static_cast<std::size_t>(depth_)};
  }

 private:
  std::size_t offset(int i, int j) const {
    return (static_cast<std::size_t>(i) * cols_ + j) * static_cast<std::size_t>(depth_);
  }
  int rows_ = 0;
  int cols_ = 0;
  int depth_ = 0;
  std::vector<double> values_;
};

// w x w x d' window around one cell, zero-padded beyond the grid.
struct LocalRegion {
  int scale = 1;
  int depth = 0;
  std::vector<double> values;           // [row][col][feature]
  std::vector<double> center_features;  // the cell's own d'-vector
};

LocalRegion extract_local_region(const LatentFeatureTensor& tensor, const CellIndex& cell, int scale);

struct ModelInput {
  CellIndex cell;
  std::vector<LocalRegion> regions;  // one per configured scale, same order
};

struct TrainingInstance {
  ModelInput input;
  ProbVector target;
};

ModelInput make_input(const LatentFeatureTensor& tensor, const CellIndex& cell, std::span<const int> scales);

struct ModelShape {
  int latent_dim = 16;
  int slots = 48;
  std::vector<int> scales{1, 3, 5, 7, 9};
  int max_kernel = 5;
  int filters = 32;
  int hidden = 64;
  std::string wavelet = "db2";
  double output_epsilon = kDefaultSmoothing;

  int kernel_for(int scale) const { return std::min(max_kernel, scale); }
  int coefficients() const { return slots / 2; }
};

void validate(const ModelShape& shape);

struct BatchNormParams {
  RowVector gamma;
  RowVector beta;
  RowVector running_mean;
  RowVector running_var;
};

// One local-CNN branch: valid convolution, then two FC layers each followed
// by batch norm and ReLU.
struct BranchParams {
  int scale = 1;
  int kernel = 1;
  RowMatrix conv_weight;  // (kernel^2 * d') x filters, row = (u*kernel + v)*d' + f
  RowVector conv_bias;    // filters
  RowMatrix fc1_weight;   // (positions * filters) x hidden
  RowVector fc1_bias;
  BatchNormParams bn1;
  RowMatrix fc2_weight;  // hidden x hidden
  RowVector fc2_bias;
  BatchNormParams bn2;

  int positions() const { return (scale - kernel + 1) * (scale - kernel + 1); }
};

struct ModelParams {
  ModelShape shape;
  std::vector<BranchParams> branches;
  RowMatrix attention;   // d' x hidden, bilinear score I_g W' Z
  RowMatrix out_weight;  // hidden x (slots/2)
  RowVector out_bias;    // slots/2
};

ModelParams init_params(const ModelShape& shape, std::uint64_t seed);
ModelParams zeros_like(const ModelParams& params);

// Named view of one learnable tensor (running statistics excluded).
struct TensorRef {
  std::string name;
  std::span<double> values;
};
std::vector<TensorRef> learnable_tensors(ModelParams& params);
// Batch-norm running statistics.
std::vector<TensorRef> buffer_tensors(ModelParams& params);

enum class Mode { kTrain, kEval };

enum class KlDirection {
  kTargetToPrediction,  // KL(target || prediction)
  kPredictionToTarget,  // KL(prediction || target)
};

struct ForwardOptions {
  Mode mode = Mode::kEval;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;  // required when mode is kTrain and dropout > 0
};

struct BranchCache {
  RowMatrix patches;     // (B*P) x (kernel^2 d')
  RowMatrix conv_pre;    // (B*P) x c
  RowMatrix conv_out;    // B x (P*c), post-ReLU
  RowMatrix fc1_pre;     // B x q
  RowMatrix bn1_hat;     // normalised fc1_pre
  RowVector bn1_invstd;
  RowVector bn1_mean;
  RowVector bn1_var;
  RowMatrix bn1_out;     // B x q, pre-ReLU
  RowMatrix drop1;       // dropout scales, empty when unused
  RowMatrix fc1_out;     // B x q, post ReLU and dropout
  RowMatrix fc2_pre;
  RowMatrix bn2_hat;
  RowVector bn2_invstd;
  RowVector bn2_mean;
  RowVector bn2_var;
  RowMatrix bn2_out;
  RowMatrix drop2;
  RowMatrix hidden;      // Z_i2
};

struct ForwardCache {
  Mode mode = Mode::kEval;
  std::size_t batch = 0;
  std::vector<BranchCache> branches;
  RowMatrix centers;       // B x d'
  RowMatrix query;         // B x q, centers * W'
  RowMatrix scores;        // B x S, raw
  RowMatrix score_drop;    // B x S dropout scales, empty when unused
  RowMatrix merged;        // B x q
  RowMatrix coefficients;  // B x k/2
  RowMatrix logits;        // B x k
  RowMatrix unnormalised;  // softplus + eps
  RowVector row_sums;
};

struct ForwardResult {
  RowMatrix prediction;  // B x k, rows are probability vectors
  RowMatrix attention;   // B x S
};

ForwardResult forward(const ModelParams& params, std::span<const ModelInput* const> batch,
                      const ForwardOptions& options, ForwardCache* cache = nullptr);

// Single-instance eval-mode convenience.
ForwardResult forward_one(const ModelParams& params, const ModelInput& input);

// Gradients (same layout as ModelParams) of a scalar loss given
// dLoss/dPrediction. Requires a train-mode cache.
ModelParams backward(const ModelParams& params, const ForwardCache& cache, const RowMatrix& prediction_grad);

// Mean over rows of KL(.)^2; optionally writes dLoss/dPrediction.
double klmse_loss(const RowMatrix& prediction, const RowMatrix& targets, KlDirection direction,
                  RowMatrix* prediction_grad = nullptr);
double klmse_loss(std::span<const ProbVector> predictions, std::span<const ProbVector> targets,
                  KlDirection direction = KlDirection::kTargetToPrediction);

// Folds the batch statistics recorded in a train-mode cache into the
// running averages: running = (1 - momentum) * running + momentum * batch.
void update_running_stats(ModelParams& params, const ForwardCache& cache, double momentum);

// The fixed output map shared with the baselines:
// coefficients -> idwt_lowpass -> softplus -> (+eps) -> normalise.
ProbVector coefficients_to_pattern(std::span<const double> coefficients, const std::string& wavelet, double epsilon);
// Approximate inverse: coefficients whose pattern is close to `pattern`.
std::vector<double> pattern_to_coefficients(const ProbVector& pattern, const std::string& wavelet);

}  // namespace alcnn

#include "alcnn/model.hpp"

#include <algorithm>
#include <cmath>

#include "alcnn/error.hpp"
#include "alcnn/random.hpp"
#include "alcnn/wavelet.hpp"

namespace alcnn {

namespace {

constexpr double kBatchNormEpsilon = 1e-5;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

RowMatrix synthesis_matrix(const ModelShape& shape) {
  const auto s = lowpass_synthesis_matrix(static_cast<std::size_t>(shape.slots), wavelet_by_name(shape.wavelet));
  RowMatrix m(shape.coefficients(), shape.slots);
  std::copy(s.begin(), s.end(), m.data());
  return m;
}

void fill_uniform(RowMatrix& m, double bound, std::mt19937_64& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -bound, bound);
}

BatchNormParams make_batch_norm(int width) {
  return {RowVector::Ones(width), RowVector::Zero(width), RowVector::Zero(width), RowVector::Ones(width)};
}

RowMatrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::mt19937_64& rng) {
  RowMatrix mask(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = uniform01(rng) < rate ? 0.0 : keep;
  return mask;
}

struct BatchNormForward {
  RowMatrix hat;
  RowMatrix out;
  RowVector mean;
  RowVector var;
  RowVector invstd;
};

BatchNormForward batch_norm_forward(const RowMatrix& x, const BatchNormParams& bn, Mode mode) {
  BatchNormForward r;
  if (mode == Mode::kTrain) {
    r.mean = x.colwise().mean();
    const RowMatrix centered = x.rowwise() - r.mean;
    r.var = centered.colwise().squaredNorm() / static_cast<double>(x.rows());
  } else {
    r.mean = bn.running_mean;
    r.var = bn.running_var;
  }
  r.invstd = (r.var.array() + kBatchNormEpsilon).rsqrt().matrix();
  r.hat = (x.rowwise() - r.mean).array().rowwise() * r.invstd.array();
  r.out = (r.hat.array().rowwise() * bn.gamma.array()).rowwise() + bn.beta.array();
  return r;
}

// dL/dx for train-mode batch norm; accumulates gamma/beta gradients.
RowMatrix batch_norm_backward(const RowMatrix& grad_out, const RowMatrix& hat, const RowVector& invstd,
                              const BatchNormParams& bn, BatchNormParams& grad) {
  const double n = static_cast<double>(grad_out.rows());
  grad.gamma += (grad_out.array() * hat.array()).matrix().colwise().sum();
  grad.beta += grad_out.colwise().sum();
  const RowMatrix grad_hat = grad_out.array().rowwise() * bn.gamma.array();
  const RowVector sum_g = grad_hat.colwise().sum();
  const RowVector sum_gh = (grad_hat.array() * hat.array()).matrix().colwise().sum();
  RowMatrix dx = (n * grad_hat).rowwise() - sum_g;
  dx -= (hat.array().rowwise() * sum_gh.array()).matrix();
  dx = dx.array().rowwise() * (invstd.array() / n);
  return dx;
}

RowMatrix relu(const RowMatrix& x) { return x.cwiseMax(0.0); }

}  // namespace

LatentFeatureTensor::LatentFeatureTensor(int rows, int cols, int depth)
    : rows_(rows), cols_(cols), depth_(depth) {
  if (rows < 1 || cols < 1 || depth < 1) throw InvalidInput("latent tensor dimensions must be positive");
  values_.assign(static_cast<std::size_t>(rows) * cols * depth, 0.0);
}

LatentFeatureTensor LatentFeatureTensor::from_cell_rows(const Eigen::MatrixXd& latent, int rows, int cols) {
  if (latent.rows() != static_cast<Eigen::Index>(rows) * cols)
    throw InvalidInput("latent matrix has " + std::to_string(latent.rows()) + " rows, grid needs " +
                       std::to_string(rows * cols));
  if (!latent.allFinite()) throw NumericError("non-finite latent feature");
  LatentFeatureTensor t(rows, cols, static_cast<int>(latent.cols()));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      for (int f = 0; f < t.depth_; ++f) t.at(i, j, f) = latent(static_cast<Eigen::Index>(i) * cols + j, f);
  return t;
}

LocalRegion extract_local_region(const LatentFeatureTensor& tensor, const CellIndex& cell, int scale) {
  if (scale < 1 || scale % 2 == 0) throw InvalidInput("local region scale must be odd and positive");
  if (cell.row < 0 || cell.row >= tensor.rows() || cell.col < 0 || cell.col >= tensor.cols())
    throw InvalidInput("cell outside latent tensor");
  const int d = tensor.depth();
  const int radius = scale / 2;
  LocalRegion region;
  region.scale = scale;
  region.depth = d;
  region.values.assign(static_cast<std::size_t>(scale) * scale * d, 0.0);
  for (int u = 0; u < scale; ++u)
    for (int v = 0; v < scale; ++v) {
      const int i = cell.row - radius + u, j = cell.col - radius + v;
      if (i < 0 || i >= tensor.rows() || j < 0 || j >= tensor.cols()) continue;
      const auto src = tensor.cell(i, j);
      std::copy(src.begin(), src.end(), region.values.begin() + (static_cast<std::ptrdiff_t>(u) * scale + v) * d);
    }
  const auto own = tensor.cell(cell.row, cell.col);
  region.center_features.assign(own.begin(), own.end());
  return region;
}

ModelInput make_input(const LatentFeatureTensor& tensor, const CellIndex& cell, std::span<const int> scales) {
  ModelInput in{cell, {}};
  in.regions.reserve(scales.size());
  for (int w : scales) in.regions.push_back(extract_local_region(tensor, cell, w));
  return in;
}

void validate(const ModelShape& shape) {
  if (shape.latent_dim < 1) throw InvalidInput("latent_dim must be positive");
  if (shape.slots < 2 || shape.slots % 2 != 0) throw InvalidInput("slots must be even and >= 2");
  if (shape.scales.empty()) throw InvalidInput("at least one scale is required");
  for (int w : shape.scales)
    if (w < 1 || w % 2 == 0) throw InvalidInput("scales must be odd and positive, got " + std::to_string(w));
  if (shape.max_kernel < 1 || shape.filters < 1 || shape.hidden < 1)
    throw InvalidInput("kernel, filter and hidden sizes must be positive");
  if (!(shape.output_epsilon > 0.0)) throw InvalidInput("output epsilon must be > 0");
  (void)wavelet_by_name(shape.wavelet);
}

ModelParams init_params(const ModelShape& shape, std::uint64_t seed) {
  validate(shape);
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.shape = shape;
  const int d = shape.latent_dim, c = shape.filters, q = shape.hidden;
  for (int w : shape.scales) {
    BranchParams b;
    b.scale = w;
    b.kernel = shape.kernel_for(w);
    const int fan_conv = b.kernel * b.kernel * d;
    b.conv_weight.resize(fan_conv, c);
    fill_uniform(b.conv_weight, std::sqrt(6.0 / fan_conv), rng);
    b.conv_bias = RowVector::Zero(c);
    const int fan1 = b.positions() * c;
    b.fc1_weight.resize(fan1, q);
    fill_uniform(b.fc1_weight, std::sqrt(6.0 / fan1), rng);
    b.fc1_bias = RowVector::Zero(q);
    b.bn1 = make_batch_norm(q);
    b.fc2_weight.resize(q, q);
    fill_uniform(b.fc2_weight, std::sqrt(6.0 / q), rng);
    b.fc2_bias = RowVector::Zero(q);
    b.bn2 = make_batch_norm(q);
    p.branches.push_back(std::move(b));
  }
  p.attention.resize(d, q);
  fill_uniform(p.attention, std::sqrt(6.0 / (d + q)), rng);
  p.out_weight.resize(q, shape.coefficients());
  fill_uniform(p.out_weight, std::sqrt(6.0 / (q + shape.coefficients())), rng);
  p.out_bias = RowVector::Zero(shape.coefficients());
  return p;
}

std::vector<TensorRef> learnable_tensors(ModelParams& p) {
  std::vector<TensorRef> out;
  auto add = [&out](std::string name, auto& m) {
    out.push_back({std::move(name), std::span<double>(m.data(), static_cast<std::size_t>(m.size()))});
  };
  for (auto& b : p.branches) {
    const std::string pre = "branch" + std::to_string(b.scale) + ".";
    add(pre + "conv_weight", b.conv_weight);
    add(pre + "conv_bias", b.conv_bias);
    add(pre + "fc1_weight", b.fc1_weight);
    add(pre + "fc1_bias", b.fc1_bias);
    add(pre + "bn1_gamma", b.bn1.gamma);
    add(pre + "bn1_beta", b.bn1.beta);
    add(pre + "fc2_weight", b.fc2_weight);
    add(pre + "fc2_bias", b.fc2_bias);
    add(pre + "bn2_gamma", b.bn2.gamma);
    add(pre + "bn2_beta", b.bn2.beta);
  }
  add("attention", p.attention);
  add("out_weight", p.out_weight);
  add("out_bias", p.out_bias);
  return out;
}

std::vector<TensorRef> buffer_tensors(ModelParams& p) {
  std::vector<TensorRef> out;
  auto add = [&out](std::string name, RowVector& v) {
    out.push_back({std::move(name), std::span<double>(v.data(), static_cast<std::size_t>(v.size()))});
  };
  for (auto& b : p.branches) {
    const std::string pre = "branch" + std::to_string(b.scale) + ".";
    add(pre + "bn1_running_mean", b.bn1.running_mean);
    add(pre + "bn1_running_var", b.bn1.running_var);
    add(pre + "bn2_running_mean", b.bn2.running_mean);
    add(pre + "bn2_running_var", b.bn2.running_var);
  }
  return out;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for (auto& t : learnable_tensors(z)) std::fill(t.values.begin(), t.values.end(), 0.0);
  for (auto& t : buffer_tensors(z)) std::fill(t.values.begin(), t.values.end(), 0.0);
  return z;
}

ForwardResult forward(const ModelParams& params, std::span<const ModelInput* const> batch,
                      const ForwardOptions& options, ForwardCache* cache) {
  const ModelShape& shape = params.shape;
  const auto B = static_cast<Eigen::Index>(batch.size());
  if (B == 0) throw InvalidInput("forward called on an empty batch");
  const std::size_t S = params.branches.size();
  const int d = shape.latent_dim;
  const bool train = options.mode == Mode::kTrain;
  const bool use_dropout = train && options.dropout > 0.0;
  if (options.dropout < 0.0 || options.dropout >= 1.0) throw InvalidInput("dropout must lie in [0, 1)");
  if (use_dropout && options.rng == nullptr) throw InvalidInput("train-mode dropout needs an rng");

  for (const ModelInput* in : batch) {
    if (in->regions.size() != S)
      throw InvalidInput("input has " + std::to_string(in->regions.size()) + " regions, model has " +
                         std::to_string(S) + " branches");
    for (std::size_t i = 0; i < S; ++i) {
      const auto& r = in->regions[i];
      if (r.scale != params.branches[i].scale || r.depth != d ||
          r.values.size() != static_cast<std::size_t>(r.scale) * r.scale * d ||
          r.center_features.size() != static_cast<std::size_t>(d))
        throw InvalidInput("region tensor for scale " + std::to_string(params.branches[i].scale) +
                           " has the wrong shape");
    }
  }

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.mode = options.mode;
  c.batch = static_cast<std::size_t>(B);
  c.branches.assign(S, {});

  for (std::size_t i = 0; i < S; ++i) {
    const BranchParams& br = params.branches[i];
    BranchCache& bc = c.branches[i];
    const int w = br.scale, k = br.kernel, out = w - k + 1, P = out * out;
    const int patch = k * k * d;
    bc.patches.resize(B * P, patch);
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto& values = batch[b]->regions[i].values;
      for (int pr = 0; pr < out; ++pr)
        for (int pc = 0; pc < out; ++pc) {
          double* dst = bc.patches.row(b * P + pr * out + pc).data();
          for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v) {
              const double* src = values.data() + (static_cast<std::ptrdiff_t>(pr + u) * w + (pc + v)) * d;
              std::copy(src, src + d, dst + (u * k + v) * d);
            }
        }
    }
    bc.conv_pre.noalias() = bc.patches * br.conv_weight;
    bc.conv_pre.rowwise() += br.conv_bias;
    bc.conv_out = relu(bc.conv_pre);
    bc.conv_out.resize(B, static_cast<Eigen::Index>(P) * shape.filters);  // row-major: same storage order

    bc.fc1_pre.noalias() = bc.conv_out * br.fc1_weight;
    bc.fc1_pre.rowwise() += br.fc1_bias;
    auto bn1 = batch_norm_forward(bc.fc1_pre, br.bn1, options.mode);
    bc.bn1_hat = std::move(bn1.hat);
    bc.bn1_invstd = std::move(bn1.invstd);
    bc.bn1_mean = std::move(bn1.mean);
    bc.bn1_var = std::move(bn1.var);
    bc.bn1_out = std::move(bn1.out);
    bc.fc1_out = relu(bc.bn1_out);
    bc.drop1.resize(0, 0);
    if (use_dropout) {
      bc.drop1 = dropout_mask(B, shape.hidden, options.dropout, *options.rng);
      bc.fc1_out.array() *= bc.drop1.array();
    }

    bc.fc2_pre.noalias() = bc.fc1_out * br.fc2_weight;
    bc.fc2_pre.rowwise() += br.fc2_bias;
    auto bn2 = batch_norm_forward(bc.fc2_pre, br.bn2, options.mode);
    bc.bn2_hat = std::move(bn2.hat);
    bc.bn2_invstd = std::move(bn2.invstd);
    bc.bn2_mean = std::move(bn2.mean);
    bc.bn2_var = std::move(bn2.var);
    bc.bn2_out = std::move(bn2.out);
    bc.hidden = relu(bc.bn2_out);
    bc.drop2.resize(0, 0);
    if (use_dropout) {
      bc.drop2 = dropout_mask(B, shape.hidden, options.dropout, *options.rng);
      bc.hidden.array() *= bc.drop2.array();
    }
  }

  c.centers.resize(B, d);
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto& own = batch[b]->regions.front().center_features;
    std::copy(own.begin(), own.end(), c.centers.row(b).data());
  }
  c.query.noalias() = c.centers * params.attention;

  const auto SS = static_cast<Eigen::Index>(S);
  c.scores.resize(B, SS);
  for (std::size_t i = 0; i < S; ++i)
    c.scores.col(static_cast<Eigen::Index>(i)) = (c.query.array() * c.branches[i].hidden.array()).rowwise().sum();
  RowMatrix effective = c.scores;
  c.score_drop.resize(0, 0);
  if (use_dropout) {
    c.score_drop = dropout_mask(B, SS, options.dropout, *options.rng);
    effective.array() *= c.score_drop.array();
  }

  ForwardResult result;
  result.attention.resize(B, SS);
  for (Eigen::Index b = 0; b < B; ++b) {
    const double mx = effective.row(b).maxCoeff();
    const RowVector e = (effective.row(b).array() - mx).exp().matrix();
    result.attention.row(b) = e / e.sum();
  }

  c.merged = RowMatrix::Zero(B, shape.hidden);
  for (std::size_t i = 0; i < S; ++i)
    c.merged.array() += c.branches[i].hidden.array().colwise() * result.attention.col(static_cast<Eigen::Index>(i)).array();

  c.coefficients.noalias() = c.merged * params.out_weight;
  c.coefficients.rowwise() += params.out_bias;
  c.logits.noalias() = c.coefficients * synthesis_matrix(shape);
  c.unnormalised = c.logits.unaryExpr([](double x) { return softplus(x); });
  c.unnormalised.array() += shape.output_epsilon;
  c.row_sums = c.unnormalised.rowwise().sum().transpose();
  result.prediction = c.unnormalised.array().colwise() / c.row_sums.transpose().array();
  if (!result.prediction.allFinite()) throw NumericError("non-finite prediction in forward pass");
  return result;
}

ForwardResult forward_one(const ModelParams& params, const ModelInput& input) {
  const ModelInput* ptr = &input;
  return forward(params, std::span<const ModelInput* const>(&ptr, 1), {});
}

ModelParams backward(const ModelParams& params, const ForwardCache& cache, const RowMatrix& prediction_grad) {
  if (cache.mode != Mode::kTrain) throw InvalidInput("backward needs a train-mode forward cache");
  const ModelShape& shape = params.shape;
  const auto B = static_cast<Eigen::Index>(cache.batch);
  const std::size_t S = params.branches.size();
  if (prediction_grad.rows() != B || prediction_grad.cols() != shape.slots)
    throw InvalidInput("prediction gradient has the wrong shape");

  ModelParams g = zeros_like(params);

  // Normalisation p = u / sum(u).
  const RowMatrix prediction = cache.unnormalised.array().colwise() / cache.row_sums.transpose().array();
  const Eigen::VectorXd dot = (prediction_grad.array() * prediction.array()).rowwise().sum();
  RowMatrix d_logits = (prediction_grad.colwise() - dot).array().colwise() / cache.row_sums.transpose().array();
  d_logits.array() *= cache.logits.unaryExpr([](double x) { return sigmoid(x); }).array();

  const RowMatrix d_coef = d_logits * synthesis_matrix(shape).transpose();
  g.out_weight.noalias() = cache.merged.transpose() * d_coef;
  g.out_bias = d_coef.colwise().sum();
  const RowMatrix d_merged = d_coef * params.out_weight.transpose();

  // Attention weights from the (possibly dropped) scores.
  RowMatrix effective = cache.scores;
  const bool score_dropout = cache.score_drop.size() > 0;
  if (score_dropout) effective.array() *= cache.score_drop.array();
  RowMatrix alpha(B, static_cast<Eigen::Index>(S));
  for (Eigen::Index b = 0; b < B; ++b) {
    const double mx = effective.row(b).maxCoeff();
    const RowVector e = (effective.row(b).array() - mx).exp().matrix();
    alpha.row(b) = e / e.sum();
  }

  RowMatrix d_alpha(B, static_cast<Eigen::Index>(S));
  std::vector<RowMatrix> d_hidden(S);
  for (std::size_t i = 0; i < S; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    d_alpha.col(ii) = (d_merged.array() * cache.branches[i].hidden.array()).rowwise().sum();
    d_hidden[i] = d_merged.array().colwise() * alpha.col(ii).array();
  }
  const Eigen::VectorXd weighted = (alpha.array() * d_alpha.array()).rowwise().sum();
  RowMatrix d_scores = alpha.array() * (d_alpha.colwise() - weighted).array();
  if (score_dropout) d_scores.array() *= cache.score_drop.array();

  RowMatrix d_query = RowMatrix::Zero(B, shape.hidden);
  for (std::size_t i = 0; i < S; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    d_hidden[i].array() += cache.query.array().colwise() * d_scores.col(ii).array();
    d_query.array() += cache.branches[i].hidden.array().colwise() * d_scores.col(ii).array();
  }
  g.attention.noalias() = cache.centers.transpose() * d_query;

  for (std::size_t i = 0; i < S; ++i) {
    const BranchParams& br = params.branches[i];
    const BranchCache& bc = cache.branches[i];
    BranchParams& gb = g.branches[i];

    RowMatrix d = d_hidden[i];
    if (bc.drop2.size() > 0) d.array() *= bc.drop2.array();
    d = (bc.bn2_out.array() > 0.0).select(d, 0.0);
    const RowMatrix d_fc2_pre = batch_norm_backward(d, bc.bn2_hat, bc.bn2_invstd, br.bn2, gb.bn2);
    gb.fc2_weight.noalias() = bc.fc1_out.transpose() * d_fc2_pre;
    gb.fc2_bias = d_fc2_pre.colwise().sum();

    d.noalias() = d_fc2_pre * br.fc2_weight.transpose();
    if (bc.drop1.size() > 0) d.array() *= bc.drop1.array();
    d = (bc.bn1_out.array() > 0.0).select(d, 0.0);
    const RowMatrix d_fc1_pre = batch_norm_backward(d, bc.bn1_hat, bc.bn1_invstd, br.bn1, gb.bn1);
    gb.fc1_weight.noalias() = bc.conv_out.transpose() * d_fc1_pre;
    gb.fc1_bias = d_fc1_pre.colwise().sum();

    RowMatrix d_conv = d_fc1_pre * br.fc1_weight.transpose();
    d_conv.resize(bc.conv_pre.rows(), bc.conv_pre.cols());
    d_conv = (bc.conv_pre.array() > 0.0).select(d_conv, 0.0);
    gb.conv_weight.noalias() = bc.patches.transpose() * d_conv;
    gb.conv_bias = d_conv.colwise().sum();
  }
  return g;
}

double klmse_loss(const RowMatrix& prediction, const RowMatrix& targets, KlDirection direction,
                  RowMatrix* prediction_grad) {
  if (prediction.rows() != targets.rows() || prediction.cols() != targets.cols())
    throw InvalidInput("prediction and target batches differ in shape");
  const auto B = prediction.rows();
  if (B == 0) throw InvalidInput("KLMSE of an empty batch");
  if (!(prediction.array() > 0.0).all() || !(targets.array() > 0.0).all())
    throw InvalidInput("KLMSE needs strictly positive probability vectors");
  if (prediction_grad) prediction_grad->resize(B, prediction.cols());
  double total = 0.0;
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto p = prediction.row(b).array();
    const auto t = targets.row(b).array();
    const double kl = direction == KlDirection::kTargetToPrediction ? (t * (t / p).log()).sum()
                                                                    : (p * (p / t).log()).sum();
    total += kl * kl;
    if (prediction_grad) {
      const double scale = 2.0 * kl / static_cast<double>(B);
      if (direction == KlDirection::kTargetToPrediction)
        prediction_grad->row(b) = (scale * -(t / p)).matrix();
      else
        prediction_grad->row(b) = (scale * ((p / t).log() + 1.0)).matrix();
    }
  }
  return total / static_cast<double>(B);
}

double klmse_loss(std::span<const ProbVector> predictions, std::span<const ProbVector> targets, KlDirection direction) {
  if (predictions.size() != targets.size()) throw InvalidInput("prediction and target counts differ");
  if (predictions.empty()) throw InvalidInput("KLMSE of an empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double kl = direction == KlDirection::kTargetToPrediction ? kl_divergence(targets[i], predictions[i])
                                                                    : kl_divergence(predictions[i], targets[i]);
    total += kl * kl;
  }
  return total / static_cast<double>(predictions.size());
}

void update_running_stats(ModelParams& params, const ForwardCache& cache, double momentum) {
  if (cache.mode != Mode::kTrain) return;
  const double n = static_cast<double>(cache.batch);
  const double unbias = cache.batch > 1 ? n / (n - 1.0) : 1.0;
  for (std::size_t i = 0; i < params.branches.size(); ++i) {
    auto& br = params.branches[i];
    const auto& bc = cache.branches[i];
    br.bn1.running_mean = (1.0 - momentum) * br.bn1.running_mean + momentum * bc.bn1_mean;
    br.bn1.running_var = (1.0 - momentum) * br.bn1.running_var + momentum * unbias * bc.bn1_var;
    br.bn2.running_mean = (1.0 - momentum) * br.bn2.running_mean + momentum * bc.bn2_mean;
    br.bn2.running_var = (1.0 - momentum) * br.bn2.running_var + momentum * unbias * bc.bn2_var;
  }
}

ProbVector coefficients_to_pattern(std::span<const double> coefficients, const std::string& wavelet, double epsilon) {
  auto y = idwt_lowpass(coefficients, wavelet_by_name(wavelet));
  for (double& v : y) v = softplus(v);
  return normalize(std::span<const double>(y), epsilon);
}

std::vector<double> pattern_to_coefficients(const ProbVector& pattern, const std::string& wavelet) {
  const double k = static_cast<double>(pattern.size());
  std::vector<double> y(pattern.size());
  // Inverse softplus of k * p (k rescales the mean entry to 1).
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = std::log(std::expm1(k * pattern[t]));
  return dwt_level1(y, wavelet_by_name(wavelet)).approx;
}

}  // namespace alcnn

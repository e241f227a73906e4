#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "alcnn/error.hpp"
#include "alcnn/model.hpp"
#include "oracles.hpp"

namespace alcnn {
namespace {

LatentFeatureTensor random_tensor(int rows, int cols, int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  LatentFeatureTensor t(rows, cols, depth);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      for (int f = 0; f < depth; ++f) t.at(i, j, f) = u(rng);
  return t;
}

std::vector<const ModelInput*> pointers(std::span<const TrainingInstance> b) {
  std::vector<const ModelInput*> out;
  for (const auto& x : b) out.push_back(&x.input);
  return out;
}

RowMatrix target_rows(std::span<const TrainingInstance> b) {
  RowMatrix t(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b[0].target.size()));
  for (std::size_t r = 0; r < b.size(); ++r)
    for (std::size_t c = 0; c < b[r].target.size(); ++c) t(r, c) = b[r].target[c];
  return t;
}

ModelParams gradients_of(const ModelParams& p, std::span<const TrainingInstance> batch) {
  ForwardOptions opt;
  opt.mode = Mode::kTrain;
  ForwardCache cache;
  const auto out = forward(p, pointers(batch), opt, &cache);
  RowMatrix g;
  klmse_loss(out.prediction, target_rows(batch), KlDirection::kTargetToPrediction, &g);
  return backward(p, cache, g);
}

TEST(Region, ScaleOneIsTheCell) {
  const auto t = random_tensor(4, 4, 3, 1);
  const auto r = extract_local_region(t, {2, 1}, 1);
  ASSERT_EQ(r.values.size(), 3u);
  for (int f = 0; f < 3; ++f) EXPECT_EQ(r.values[f], t.at(2, 1, f));
}

TEST(Region, CornerIsZeroPadded) {
  const auto t = random_tensor(4, 4, 2, 2);
  const auto r = extract_local_region(t, {0, 0}, 3);
  int zero = 0;
  for (int p = 0; p < 9; ++p) zero += (r.values[p * 2] == 0.0 && r.values[p * 2 + 1] == 0.0);
  EXPECT_EQ(zero, 5);
}

TEST(Region, InteriorMatchesSlicing) {
  const auto t = random_tensor(9, 9, 3, 3);
  const int w = 5, h = 2;
  const auto r = extract_local_region(t, {4, 5}, w);
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < w; ++b)
      for (int f = 0; f < 3; ++f) EXPECT_EQ(r.values[(a * w + b) * 3 + f], t.at(4 - h + a, 5 - h + b, f));
  for (int f = 0; f < 3; ++f) {
    EXPECT_EQ(r.center_features[f], t.at(4, 5, f));
    EXPECT_EQ(r.values[(h * w + h) * 3 + f], r.center_features[f]);
  }
}

TEST(Region, EvenScaleRejected) {
  EXPECT_THROW(extract_local_region(random_tensor(3, 3, 1, 4), {1, 1}, 4), InvalidInput);
}

TEST(Forward, SingleScaleAttentionIsOne) {
  auto shape = testing::tiny_shape();
  shape.scales = {3};
  std::mt19937_64 rng(5);
  const auto batch = testing::random_instances(shape, 5, 5, 4, rng);
  const auto p = init_params(shape, 5);
  for (const auto& x : batch) EXPECT_EQ(forward_one(p, x.input).attention(0, 0), 1.0);
}

TEST(Forward, SimplexAndValidPrediction) {
  const auto shape = testing::tiny_shape();
  std::mt19937_64 rng(6);
  for (int n = 0; n < 200; ++n) {
    const auto p = testing::jittered_params(shape, 100 + n);
    const auto batch = testing::random_instances(shape, 6, 6, 3, rng);
    ForwardOptions opt;
    opt.mode = n % 2 ? Mode::kTrain : Mode::kEval;
    opt.dropout = 0.1;
    opt.rng = &rng;
    const auto out = forward(p, pointers(batch), opt);
    for (Eigen::Index r = 0; r < out.attention.rows(); ++r) {
      EXPECT_NEAR(out.attention.row(r).sum(), 1.0, 1e-9);
      EXPECT_GE(out.attention.row(r).minCoeff(), 0.0);
      EXPECT_NEAR(out.prediction.row(r).sum(), 1.0, 1e-9);
      EXPECT_GT(out.prediction.row(r).minCoeff(), 0.0);
    }
  }
}

TEST(Forward, DuplicateScaleGivesEqualAttention) {
  auto shape = testing::tiny_shape();
  shape.scales = {3, 3};
  auto p = testing::jittered_params(shape, 7);
  p.branches[1] = p.branches[0];
  std::mt19937_64 rng(7);
  for (const auto& x : testing::random_instances(shape, 5, 5, 5, rng)) {
    const auto out = forward_one(p, x.input);
    EXPECT_EQ(out.attention(0, 0), out.attention(0, 1));
  }
}

TEST(Forward, EvalIsDeterministic) {
  const auto shape = testing::tiny_shape();
  const auto p = testing::jittered_params(shape, 8);
  std::mt19937_64 rng(8);
  const auto batch = testing::random_instances(shape, 5, 5, 1, rng);
  const auto a = forward_one(p, batch[0].input), b = forward_one(p, batch[0].input);
  EXPECT_EQ(a.prediction, b.prediction);
  EXPECT_EQ(a.attention, b.attention);
}

TEST(Forward, RegionCountMismatchNamesTensor) {
  const auto shape = testing::tiny_shape();
  const auto p = init_params(shape, 9);
  std::mt19937_64 rng(9);
  auto batch = testing::random_instances(shape, 5, 5, 1, rng);
  batch[0].input.regions.pop_back();
  EXPECT_THROW(forward_one(p, batch[0].input), InvalidInput);
  batch = testing::random_instances(shape, 5, 5, 1, rng);
  batch[0].input.regions[1].values.pop_back();
  try {
    forward_one(p, batch[0].input);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("scale 3"), std::string::npos) << e.what();
  }
}

TEST(Klmse, IdenticalIsZero) {
  std::mt19937_64 rng(10);
  std::vector<ProbVector> a;
  for (int i = 0; i < 5; ++i) a.push_back(testing::random_prob(rng, 8));
  EXPECT_EQ(klmse_loss(a, a), 0.0);
}

TEST(Klmse, SquareOfHandKl) {
  const std::vector<ProbVector> target{ProbVector({0.5, 0.5})}, pred{ProbVector({0.9, 0.1})};
  const double kl = 0.5108256237659907;
  EXPECT_NEAR(klmse_loss(pred, target), kl * kl, 1e-12);
  EXPECT_NEAR(klmse_loss(pred, target), 0.2609, 1e-4);
  EXPECT_NEAR(klmse_loss(target, pred, KlDirection::kPredictionToTarget), kl * kl, 1e-12);
}

TEST(Klmse, BatchPermutationInvariant) {
  std::mt19937_64 rng(11);
  std::vector<ProbVector> p, t;
  for (int i = 0; i < 7; ++i) {
    p.push_back(testing::random_prob(rng, 8));
    t.push_back(testing::random_prob(rng, 8));
  }
  const double before = klmse_loss(p, t);
  std::vector<std::size_t> idx(7);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<ProbVector> p2, t2;
  for (auto i : idx) {
    p2.push_back(p[i]);
    t2.push_back(t[i]);
  }
  EXPECT_NEAR(klmse_loss(p2, t2), before, 1e-15);
}

TEST(Klmse, RejectsMismatchedBatches) {
  std::mt19937_64 rng(12);
  const std::vector<ProbVector> a{testing::random_prob(rng, 4)}, b;
  EXPECT_THROW(klmse_loss(a, b), InvalidInput);
}

class GradientSeeds : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(GradientSeeds, MatchesCentralDifferences) {
  const auto shape = testing::tiny_shape();
  std::mt19937_64 rng(GetParam());
  const auto batch = testing::random_instances(shape, 6, 6, 5, rng);
  for (auto dir : {KlDirection::kTargetToPrediction, KlDirection::kPredictionToTarget}) {
    const auto r = testing::check_gradients(testing::jittered_params(shape, GetParam()), batch, dir, 1e-5, 1e-6);
    EXPECT_LT(r.max_error, 1e-4) << r.worst_block;
  }
}

TEST(Backward, BiasBeforeBatchNormHasZeroGradient) {
  // Batch norm subtracts the batch mean, so a bias added just before it
  // cannot change the loss.
  const auto shape = testing::tiny_shape();
  std::mt19937_64 rng(23);
  const auto batch = testing::random_instances(shape, 5, 5, 4, rng);
  auto g = gradients_of(testing::jittered_params(shape, 23), batch);
  for (const auto& b : g.branches) {
    EXPECT_LT(b.fc1_bias.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(b.fc2_bias.cwiseAbs().maxCoeff(), 1e-14);
  }
}

INSTANTIATE_TEST_SUITE_P(Model, GradientSeeds, ::testing::Values(21u, 22u));

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  const auto shape = testing::tiny_shape();
  std::mt19937_64 rng(13);
  const auto batch = testing::random_instances(shape, 5, 5, 4, rng);
  const auto p = testing::jittered_params(shape, 13);
  ForwardOptions opt;
  opt.mode = Mode::kTrain;
  ForwardCache cache;
  const auto out = forward(p, pointers(batch), opt, &cache);
  auto g = backward(p, cache, RowMatrix::Zero(out.prediction.rows(), out.prediction.cols()));
  for (const auto& t : learnable_tensors(g))
    for (double v : t.values) ASSERT_EQ(v, 0.0) << t.name;
}

TEST(Backward, DuplicatedBatchGivesSameMeanGradient) {
  const auto shape = testing::tiny_shape();
  std::mt19937_64 rng(14);
  const auto batch = testing::random_instances(shape, 5, 5, 4, rng);
  auto doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  const auto p = testing::jittered_params(shape, 14);
  auto a = gradients_of(p, batch), b = gradients_of(p, doubled);
  const auto ta = learnable_tensors(a), tb = learnable_tensors(b);
  for (std::size_t i = 0; i < ta.size(); ++i)
    for (std::size_t j = 0; j < ta[i].values.size(); ++j)
      EXPECT_NEAR(ta[i].values[j], tb[i].values[j], 1e-12) << ta[i].name;
}

TEST(Backward, NeedsTrainCache) {
  const auto shape = testing::tiny_shape();
  std::mt19937_64 rng(15);
  const auto batch = testing::random_instances(shape, 5, 5, 2, rng);
  const auto p = init_params(shape, 15);
  ForwardCache cache;
  const auto out = forward(p, pointers(batch), {}, &cache);
  EXPECT_THROW(backward(p, cache, out.prediction), InvalidInput);
}

TEST(OutputMap, ValidAndRoughlyInvertible) {
  std::mt19937_64 rng(16);
  for (int n = 0; n < 20; ++n) {
    const auto target = testing::random_prob(rng, 48);
    const auto c = pattern_to_coefficients(target, "db2");
    ASSERT_EQ(c.size(), 24u);
    const auto back = coefficients_to_pattern(c, "db2", kDefaultSmoothing);
    EXPECT_NEAR(std::accumulate(back.begin(), back.end(), 0.0), 1.0, 1e-9);
    // Low-pass loses detail, so only a loose closeness is expected.
    EXPECT_LT(kl_divergence(target, back), 0.2);
  }
}

TEST(Params, InitIsDeterministicAndShaped) {
  const auto shape = testing::tiny_shape();
  auto a = init_params(shape, 3), b = init_params(shape, 3);
  const auto ta = learnable_tensors(a), tb = learnable_tensors(b);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i)
    EXPECT_TRUE(std::equal(ta[i].values.begin(), ta[i].values.end(), tb[i].values.begin()));
  EXPECT_EQ(a.branches[1].kernel, 3);
  EXPECT_EQ(a.branches[1].positions(), 1);
  EXPECT_EQ(a.attention.rows(), 3);
  EXPECT_EQ(a.attention.cols(), 4);
  EXPECT_EQ(a.out_weight.cols(), 4);
}

}  // namespace
}  // namespace alcnn

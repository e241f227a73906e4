#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "alcnn/baselines.hpp"
#include "alcnn/error.hpp"
#include "oracles.hpp"

namespace alcnn {
namespace {

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = n(rng);
  return m;
}

// Gaussian elimination with partial pivoting on (XcᵀXc + λI) w = Xcᵀy.
std::vector<double> normal_equations(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  const int n = static_cast<int>(X.rows()), d = static_cast<int>(X.cols());
  std::vector<double> xm(d, 0.0);
  double ym = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) xm[c] += X(r, c) / n;
    ym += y(r) / n;
  }
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j)
      for (int r = 0; r < n; ++r) a[i][j] += (X(r, i) - xm[i]) * (X(r, j) - xm[j]);
    a[i][i] += lambda;
    for (int r = 0; r < n; ++r) a[i][d] += (X(r, i) - xm[i]) * (y(r) - ym);
  }
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (int r = col + 1; r < d; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c <= d; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> w(d);
  for (int i = d - 1; i >= 0; --i) {
    double s = a[i][d];
    for (int j = i + 1; j < d; ++j) s -= a[i][j] * w[j];
    w[i] = s / a[i][i];
  }
  double b = ym;
  for (int c = 0; c < d; ++c) b -= xm[c] * w[c];
  w.push_back(b);
  return w;
}

TEST(Ridge, MatchesNormalEquationOracle) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd X = gaussian(5, 3, rng), Y = gaussian(5, 2, rng);
  const auto m = ridge_fit(X, Y, 0.1);
  for (int o = 0; o < 2; ++o) {
    const auto w = normal_equations(X, Y.col(o), 0.1);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(m.weights(c, o), w[c], 1e-12);
    EXPECT_NEAR(m.bias(o), w[3], 1e-12);
  }
}

TEST(Ridge, LargeLambdaShrinksToMean) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd X = gaussian(20, 4, rng), Y = gaussian(20, 3, rng);
  const auto m = ridge_fit(X, Y, 1e12);
  EXPECT_LT(m.weights.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((m.bias.transpose() - Y.colwise().mean()).cwiseAbs().maxCoeff(), 1e-9);

  std::vector<ProbVector> pats;
  for (int r = 0; r < 20; ++r) pats.push_back(testing::random_prob(rng, 8));
  const auto pm = ridge_fit_patterns(X, pats, 1e12, "db2", kDefaultSmoothing);
  std::vector<double> bias(pm.ridge.bias.data(), pm.ridge.bias.data() + pm.ridge.bias.size());
  const auto expect = coefficients_to_pattern(bias, "db2", kDefaultSmoothing);
  const std::vector<double> q{0.3, -1.0, 2.0, 0.5};
  const auto got = ridge_predict_pattern(pm, q);
  for (std::size_t t = 0; t < 8; ++t) EXPECT_NEAR(got[t], expect[t], 1e-9);
}

TEST(Ridge, InterpolatesLinearTargets) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd X = gaussian(30, 4, rng), W = gaussian(4, 2, rng);
  Eigen::MatrixXd Y = X * W;
  Y.col(0).array() += 0.7;
  const auto m = ridge_fit(X, Y, 1e-8);
  EXPECT_LT((ridge_predict(m, X) - Y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Ridge, ResidualNondecreasingInLambda) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd X = gaussian(25, 5, rng), Y = gaussian(25, 2, rng);
  double prev = 0.0;
  for (double lambda : {1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3}) {
    const double res = (ridge_predict(ridge_fit(X, Y, lambda), X) - Y).squaredNorm();
    EXPECT_GE(res, prev - 1e-12) << lambda;
    prev = res;
  }
}

TEST(Ridge, RejectsBadInput) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd X = gaussian(4, 2, rng), Y = gaussian(3, 1, rng);
  EXPECT_THROW(ridge_fit(X, Y, 0.1), InvalidInput);
  EXPECT_THROW(ridge_fit(X, gaussian(4, 1, rng), 0.0), InvalidInput);
  EXPECT_THROW(ridge_predict(ridge_fit(X, gaussian(4, 1, rng), 0.1), gaussian(1, 3, rng)), InvalidInput);
}

struct KnnFixture {
  Eigen::MatrixXd F;
  std::vector<ProbVector> P;
};

KnnFixture knn_data(int n, int d, std::mt19937_64& rng) {
  KnnFixture f{gaussian(n, d, rng), {}};
  for (int r = 0; r < n; ++r) f.P.push_back(testing::random_prob(rng, 6));
  return f;
}

TEST(Knn, KOneReturnsExactRow) {
  std::mt19937_64 rng(6);
  const auto f = knn_data(15, 4, rng);
  const Eigen::RowVectorXd q = f.F.row(7);
  const auto r = knn_predict(std::span<const double>(q.data(), 4), f.F, f.P, 1);
  ASSERT_EQ(r.neighbours, std::vector<std::size_t>{7});
  for (std::size_t t = 0; t < 6; ++t) EXPECT_NEAR(r.pattern[t], f.P[7][t], 1e-15);
}

TEST(Knn, KEqualsSizeIsGlobalMean) {
  std::mt19937_64 rng(7);
  const auto f = knn_data(9, 3, rng);
  const std::vector<double> q{1.0, 2.0, -0.5};
  const auto r = knn_predict(q, f.F, f.P, 9);
  for (std::size_t t = 0; t < 6; ++t) {
    double m = 0.0;
    for (const auto& p : f.P) m += p[t] / 9.0;
    EXPECT_NEAR(r.pattern[t], m, 1e-15);
  }
  EXPECT_EQ(knn_predict(q, f.F, f.P, 50).neighbours.size(), 9u);
}

TEST(Knn, MatchesBruteForceSort) {
  std::mt19937_64 rng(8);
  const auto f = knn_data(40, 5, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = gaussian(5, 1, rng);
    std::vector<std::pair<double, std::size_t>> all;
    for (int r = 0; r < 40; ++r) all.push_back({f.F.row(r).dot(q) / (f.F.row(r).norm() * q.norm()), r});
    std::stable_sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first > b.first; });
    const auto r = knn_predict(std::span<const double>(q.data(), 5), f.F, f.P, 10);
    for (std::size_t n = 0; n < 10; ++n) EXPECT_EQ(r.neighbours[n], all[n].second);
  }
}

TEST(Knn, TiesGoToLowerIndex) {
  Eigen::MatrixXd F(4, 2);
  F << 1, 0, 0, 1, 2, 0, 1, 0;  // rows 0, 2, 3 are parallel to the query
  const std::vector<ProbVector> P(4, ProbVector::uniform(2));
  const std::vector<double> q{3.0, 0.0};
  EXPECT_EQ(knn_predict(q, F, P, 2).neighbours, (std::vector<std::size_t>{0, 2}));
}

TEST(Knn, ZeroQueryFallsBackToUniform) {
  std::mt19937_64 rng(9);
  const auto f = knn_data(5, 3, rng);
  const std::vector<double> q(3, 0.0);
  const auto r = knn_predict(q, f.F, f.P, 2);
  EXPECT_TRUE(r.fallback);
  for (double v : r.pattern) EXPECT_DOUBLE_EQ(v, 1.0 / 6.0);
}

TEST(Knn, PermutationInvariant) {
  std::mt19937_64 rng(10);
  const auto f = knn_data(30, 4, rng);
  std::vector<int> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  KnnFixture g{Eigen::MatrixXd(30, 4), {}};
  for (int r = 0; r < 30; ++r) {
    g.F.row(r) = f.F.row(perm[r]);
    g.P.push_back(f.P[perm[r]]);
  }
  const std::vector<double> q{0.2, -0.4, 1.1, 0.0};
  const auto a = knn_predict(q, f.F, f.P, 7), b = knn_predict(q, g.F, g.P, 7);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_NEAR(a.pattern[t], b.pattern[t], 1e-15);
}

TEST(Knn, RejectsBadInput) {
  std::mt19937_64 rng(11);
  const auto f = knn_data(5, 3, rng);
  EXPECT_THROW(knn_predict(std::vector<double>{1.0, 2.0}, f.F, f.P, 2), InvalidInput);
  EXPECT_THROW(knn_predict(std::vector<double>{1.0, 2.0, 3.0}, f.F, f.P, 0), InvalidInput);
}

}  // namespace
}  // namespace alcnn

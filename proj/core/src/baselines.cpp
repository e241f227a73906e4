#include "alcnn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alcnn/error.hpp"

namespace alcnn {

RidgeModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double lambda) {
  if (X.rows() < 1) throw InvalidInput("ridge needs at least one sample");
  if (X.rows() != Y.rows()) throw InvalidInput("ridge features and targets differ in row count");
  if (!(lambda > 0.0)) throw InvalidInput("ridge lambda must be > 0");
  if (!X.allFinite() || !Y.allFinite()) throw NumericError("non-finite ridge input");
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const Eigen::RowVectorXd y_mean = Y.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::MatrixXd Yc = Y.rowwise() - y_mean;
  Eigen::MatrixXd A = Xc.transpose() * Xc;
  A.diagonal().array() += lambda;
  RidgeModel m;
  m.lambda = lambda;
  m.weights = A.ldlt().solve(Xc.transpose() * Yc);
  m.bias = (y_mean - x_mean * m.weights).transpose();
  if (!m.weights.allFinite()) throw NumericError("non-finite ridge solution");
  return m;
}

Eigen::MatrixXd ridge_predict(const RidgeModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.weights.rows())
    throw InvalidInput("ridge query has " + std::to_string(X.cols()) + " features, model expects " +
                       std::to_string(m.weights.rows()));
  Eigen::MatrixXd out = X * m.weights;
  out.rowwise() += m.bias.transpose();
  return out;
}

RidgePatternModel ridge_fit_patterns(const Eigen::MatrixXd& features, std::span<const ProbVector> patterns,
                                     double lambda, const std::string& wavelet, double epsilon) {
  if (static_cast<std::size_t>(features.rows()) != patterns.size())
    throw InvalidInput("ridge feature rows and pattern count differ");
  if (patterns.empty()) throw InvalidInput("ridge needs at least one sample");
  const std::size_t half = patterns.front().size() / 2;
  Eigen::MatrixXd Y(features.rows(), static_cast<Eigen::Index>(half));
  for (std::size_t r = 0; r < patterns.size(); ++r) {
    const auto c = pattern_to_coefficients(patterns[r], wavelet);
    if (c.size() != half) throw InvalidInput("patterns differ in length");
    for (std::size_t j = 0; j < half; ++j) Y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = c[j];
  }
  return {ridge_fit(features, Y, lambda), wavelet, epsilon};
}

ProbVector ridge_predict_pattern(const RidgePatternModel& model, std::span<const double> query) {
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::RowVectorXd>(query.data(), static_cast<Eigen::Index>(query.size()));
  const Eigen::RowVectorXd c = ridge_predict(model.ridge, x).row(0);
  return coefficients_to_pattern(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())), model.wavelet,
                                 model.epsilon);
}

KnnPrediction knn_predict(std::span<const double> query, const Eigen::MatrixXd& F,
                          std::span<const ProbVector> patterns, int K) {
  if (F.rows() == 0 || patterns.empty()) throw InvalidInput("KNN needs a nonempty training set");
  if (static_cast<std::size_t>(F.rows()) != patterns.size()) throw InvalidInput("KNN features and patterns differ in count");
  if (K < 1) throw InvalidInput("KNN needs K >= 1");
  if (static_cast<Eigen::Index>(query.size()) != F.cols()) throw InvalidInput("KNN query dimension mismatch");
  const std::size_t k = patterns.front().size();

  const Eigen::Map<const Eigen::VectorXd> q(query.data(), static_cast<Eigen::Index>(query.size()));
  const double qn = q.norm();
  if (qn == 0.0) return {ProbVector::uniform(k), true, {}};

  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(patterns.size());
  for (Eigen::Index r = 0; r < F.rows(); ++r) {
    const double rn = F.row(r).norm();
    const double sim = rn == 0.0 ? 0.0 : F.row(r).dot(q) / (rn * qn);
    ranked.emplace_back(-sim, static_cast<std::size_t>(r));
  }
  const auto take = std::min(static_cast<std::size_t>(K), ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());

  KnnPrediction out;
  std::vector<double> mean(k, 0.0);
  for (std::size_t n = 0; n < take; ++n) {
    const auto& p = patterns[ranked[n].second];
    if (p.size() != k) throw InvalidInput("KNN training patterns differ in length");
    out.neighbours.push_back(ranked[n].second);
    for (std::size_t t = 0; t < k; ++t) mean[t] += p[t];
  }
  const double total = std::accumulate(mean.begin(), mean.end(), 0.0);
  for (double& v : mean) v /= total;
  out.pattern = ProbVector(std::move(mean));
  return out;
}

}  // namespace alcnn

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alcnn/geo_grid.hpp"
#include "alcnn/model.hpp"

namespace alcnn {

// Ridge regression with an unpenalised intercept: features are centred,
// (XᵀX + λI) W = XᵀY is solved on the centred data, and the bias restores
// the means.
struct RidgeModel {
  Eigen::MatrixXd weights;  // d' x outputs
  Eigen::VectorXd bias;     // outputs
  double lambda = 0.1;
};

RidgeModel ridge_fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, double lambda = 0.1);
Eigen::MatrixXd ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& features);

// Ridge on DWT approximation coefficients, mapped back to a pattern with
// the same output map as the network.
struct RidgePatternModel {
  RidgeModel ridge;
  std::string wavelet = "db2";
  double epsilon = kDefaultSmoothing;
};

RidgePatternModel ridge_fit_patterns(const Eigen::MatrixXd& features, std::span<const ProbVector> patterns,
                                     double lambda, const std::string& wavelet, double epsilon);
ProbVector ridge_predict_pattern(const RidgePatternModel& model, std::span<const double> query);

struct KnnPrediction {
  ProbVector pattern;
  bool fallback = false;  // zero-norm query, uniform returned
  std::vector<std::size_t> neighbours;
};

// Mean pattern of the K training rows most cosine-similar to the query;
// equal similarities are broken by the lower row index.
KnnPrediction knn_predict(std::span<const double> query, const Eigen::MatrixXd& training_features,
                          std::span<const ProbVector> training_patterns, int K = 10);

}  // namespace alcnn

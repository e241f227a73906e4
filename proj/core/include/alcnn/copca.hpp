#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alcnn/features.hpp"

namespace alcnn {

// Joint PCA fitted on the row-stack of two cities' feature matrices.
// Columns are z-scored first; constant columns keep scale 1.
struct CoPcaTransform {
  std::vector<std::string> columns;
  Eigen::VectorXd means;
  Eigen::VectorXd scales;
  Eigen::MatrixXd projection;          // d x d', orthonormal columns
  Eigen::VectorXd explained_variance;  // d', nonincreasing

  int input_dim() const { return static_cast<int>(means.size()); }
  int latent_dim() const { return static_cast<int>(projection.cols()); }
};

struct JointFit {
  CoPcaTransform transform;
  Eigen::MatrixXd latent_source;  // source rows x d'
  Eigen::MatrixXd latent_target;  // target rows x d'
};

JointFit fit_joint(const FeatureMatrix& source, const FeatureMatrix& target, int latent_dim);

// Fit on an arbitrary stacked data matrix (rows = samples).
CoPcaTransform fit_pca(const Eigen::MatrixXd& stacked, std::vector<std::string> columns, int latent_dim);

Eigen::MatrixXd transform(const CoPcaTransform& t, const Eigen::MatrixXd& data);
Eigen::MatrixXd transform(const CoPcaTransform& t, const FeatureMatrix& features);

// Inverse map back to raw feature space (exact when d' = rank).
Eigen::MatrixXd back_project(const CoPcaTransform& t, const Eigen::MatrixXd& latent);

Eigen::MatrixXd to_matrix(const FeatureMatrix& features);

}  // namespace alcnn

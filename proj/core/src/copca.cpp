#include "alcnn/copca.hpp"

#include <cmath>

#include "alcnn/error.hpp"

namespace alcnn {

Eigen::MatrixXd to_matrix(const FeatureMatrix& features) {
  Eigen::MatrixXd m(features.rows(), features.cols());
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t c = 0; c < features.cols(); ++c) m(r, c) = features.at(r, c);
  return m;
}

CoPcaTransform fit_pca(const Eigen::MatrixXd& stacked, std::vector<std::string> columns, int latent_dim) {
  const Eigen::Index n = stacked.rows(), d = stacked.cols();
  if (latent_dim < 1 || latent_dim > d)
    throw InvalidInput("latent dimension " + std::to_string(latent_dim) + " outside [1, " + std::to_string(d) + "]");
  if (n < 2 || n < latent_dim) throw InvalidInput("PCA needs at least max(2, d') stacked rows");
  if (!stacked.allFinite()) throw NumericError("non-finite value in PCA input");

  CoPcaTransform t;
  t.columns = std::move(columns);
  t.means = stacked.colwise().mean().transpose();
  const Eigen::MatrixXd centered = stacked.rowwise() - t.means.transpose();
  t.scales.resize(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const double sd = std::sqrt(centered.col(c).squaredNorm() / static_cast<double>(n - 1));
    t.scales(c) = (sd > 1e-12 * std::max(1.0, std::abs(t.means(c)))) ? sd : 1.0;
  }
  const Eigen::MatrixXd z = centered.array().rowwise() / t.scales.transpose().array();
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
  const Eigen::VectorXd values = eig.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

  const double tol = std::max(values(0), 0.0) * static_cast<double>(d) * 1e-12;
  int rank = 0;
  while (rank < d && values(rank) > tol) ++rank;
  if (latent_dim > rank)
    throw InvalidInput("latent dimension " + std::to_string(latent_dim) + " exceeds achievable rank " +
                       std::to_string(rank));

  t.projection = vectors.leftCols(latent_dim);
  t.explained_variance = values.head(latent_dim);
  for (int j = 0; j < latent_dim; ++j) {
    Eigen::Index arg = 0;
    t.projection.col(j).cwiseAbs().maxCoeff(&arg);
    if (t.projection(arg, j) < 0.0) t.projection.col(j) *= -1.0;
  }
  return t;
}

JointFit fit_joint(const FeatureMatrix& source, const FeatureMatrix& target, int latent_dim) {
  if (source.columns() != target.columns()) throw DataError("source and target feature schemas differ");
  const Eigen::MatrixXd src = to_matrix(source), tgt = to_matrix(target);
  Eigen::MatrixXd stacked(src.rows() + tgt.rows(), src.cols());
  stacked << src, tgt;

  JointFit fit;
  fit.transform = fit_pca(stacked, source.columns(), latent_dim);
  const Eigen::MatrixXd latent = transform(fit.transform, stacked);
  fit.latent_source = latent.topRows(src.rows());
  fit.latent_target = latent.bottomRows(tgt.rows());
  return fit;
}

Eigen::MatrixXd transform(const CoPcaTransform& t, const Eigen::MatrixXd& data) {
  if (data.cols() != t.means.size())
    throw DataError("feature width " + std::to_string(data.cols()) + " does not match fitted width " +
                    std::to_string(t.means.size()));
  const Eigen::MatrixXd z =
      (data.rowwise() - t.means.transpose()).array().rowwise() / t.scales.transpose().array();
  // Explicit loops keep every output row independent of how many rows are
  // transformed together (a blocked GEMM may reorder the sums).
  Eigen::MatrixXd out(z.rows(), t.projection.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r)
    for (Eigen::Index j = 0; j < t.projection.cols(); ++j) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < z.cols(); ++c) acc += z(r, c) * t.projection(c, j);
      out(r, j) = acc;
    }
  return out;
}

Eigen::MatrixXd transform(const CoPcaTransform& t, const FeatureMatrix& features) {
  if (!t.columns.empty() && features.columns() != t.columns) throw DataError("feature schema does not match transform");
  return transform(t, to_matrix(features));
}

Eigen::MatrixXd back_project(const CoPcaTransform& t, const Eigen::MatrixXd& latent) {
  if (latent.cols() != t.projection.cols()) throw InvalidInput("latent width does not match transform");
  const Eigen::MatrixXd z = latent * t.projection.transpose();
  return (z.array().rowwise() * t.scales.transpose().array()).matrix().rowwise() + t.means.transpose();
}

}  // namespace alcnn

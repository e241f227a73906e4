#include "alcnn/inference.hpp"

#include "alcnn/error.hpp"

namespace alcnn {

PatternMap pattern_map(const std::map<CellIndex, MinedPattern>& mined, bool accepted_only) {
  PatternMap out;
  for (const auto& [cell, m] : mined)
    if (m.accepted || !accepted_only) out.emplace(cell, m.candidate.pattern);
  return out;
}

std::vector<TrainingInstance> build_instances(const LatentFeatureTensor& tensor, const PatternMap& targets,
                                              std::span<const int> scales) {
  std::vector<TrainingInstance> out;
  for (const auto& [cell, pattern] : targets) {
    if (cell.row < 0 || cell.row >= tensor.rows() || cell.col < 0 || cell.col >= tensor.cols()) continue;
    out.push_back({make_input(tensor, cell, scales), pattern});
  }
  return out;
}

CityInference infer_city(const ModelParams& params, const LatentFeatureTensor& tensor) {
  if (tensor.depth() != params.shape.latent_dim)
    throw InvalidInput("latent depth " + std::to_string(tensor.depth()) + " does not match the model's " +
                       std::to_string(params.shape.latent_dim));
  CityInference out;
  for (int i = 0; i < tensor.rows(); ++i)
    for (int j = 0; j < tensor.cols(); ++j) {
      const CellIndex cell{i, j};
      const auto r = forward_one(params, make_input(tensor, cell, params.shape.scales));
      out.patterns.emplace(cell, ProbVector(std::vector<double>(r.prediction.data(), r.prediction.data() + r.prediction.size())));
      out.attention.emplace(cell, std::vector<double>(r.attention.data(), r.attention.data() + r.attention.size()));
    }
  return out;
}

EvaluationReport evaluate(const PatternMap& predicted, const PatternMap& truth, KlDirection direction) {
  EvaluationReport r;
  double total = 0.0;
  for (const auto& [cell, t] : truth) {
    const auto it = predicted.find(cell);
    if (it == predicted.end()) {
      ++r.skipped;
      continue;
    }
    const double kl = direction == KlDirection::kTargetToPrediction ? kl_divergence(t, it->second)
                                                                    : kl_divergence(it->second, t);
    r.cell_kl.emplace(cell, kl);
    total += kl * kl;
  }
  for (const auto& [cell, p] : predicted)
    if (!truth.contains(cell)) ++r.skipped;
  r.compared = r.cell_kl.size();
  if (r.compared == 0) throw InvalidInput("predicted and ground-truth maps share no cells");
  r.klmse = total / static_cast<double>(r.compared);
  return r;
}

}  // namespace alcnn

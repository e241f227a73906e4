#pragma once

#include <map>
#include <span>
#include <vector>

#include "alcnn/dwt_pattern.hpp"
#include "alcnn/model.hpp"

namespace alcnn {

using PatternMap = std::map<CellIndex, ProbVector>;

// Patterns of the mined cells, optionally only the accepted ones.
PatternMap pattern_map(const std::map<CellIndex, MinedPattern>& mined, bool accepted_only);

// One instance per cell present in both the tensor and `targets`, in
// ascending cell order.
std::vector<TrainingInstance> build_instances(const LatentFeatureTensor& tensor, const PatternMap& targets,
                                              std::span<const int> scales);

struct CityInference {
  PatternMap patterns;
  std::map<CellIndex, std::vector<double>> attention;  // one weight per scale
};

// Eval-mode forward on every cell, one cell at a time, so each output is
// identical to forward_one on that cell.
CityInference infer_city(const ModelParams& params, const LatentFeatureTensor& tensor);

struct EvaluationReport {
  double klmse = 0.0;
  std::map<CellIndex, double> cell_kl;
  std::size_t compared = 0;
  std::size_t skipped = 0;  // cells present in only one of the maps
};

EvaluationReport evaluate(const PatternMap& predicted, const PatternMap& truth,
                          KlDirection direction = KlDirection::kTargetToPrediction);

}  // namespace alcnn

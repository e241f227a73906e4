#include "alcnn/dwt_pattern.hpp"

#include <algorithm>
#include <numeric>

#include "alcnn/error.hpp"

namespace alcnn {

std::vector<double> lowpass_profile(std::span<const double> x, const WaveletFilters& f) {
  return idwt_lowpass(dwt_level1(x, f).approx, f);
}

namespace {

void clamp_negative(std::vector<double>& v) {
  for (double& x : v) x = std::max(0.0, x);
}

ProbVector comparison_vector(const DemandVector& day, const WaveletFilters& f, const MiningOptions& options) {
  std::vector<double> counts(day.counts.begin(), day.counts.end());
  if (options.comparison == DayComparison::kDayProfile) {
    counts = lowpass_profile(counts, f);
    clamp_negative(counts);
  }
  return normalize(std::span<const double>(counts), options.day_pseudocount);
}

}  // namespace

MinedPattern mine_pattern(std::span<const DemandVector> days, const WaveletFilters& f, const MiningOptions& options) {
  if (days.size() < 2) throw InsufficientData("pattern mining needs at least 2 days, got " + std::to_string(days.size()));
  if (!(options.epsilon > 0.0) || !(options.day_pseudocount > 0.0))
    throw InvalidInput("mining smoothing constants must be > 0");
  const std::size_t k = days.front().counts.size();
  for (const auto& d : days)
    if (d.counts.size() != k) throw InvalidInput("demand vectors of one cell differ in length");

  std::vector<double> mean(k, 0.0);
  for (const auto& d : days) {
    const ProbVector p = normalize(std::span<const int>(d.counts), options.epsilon);
    const auto profile = lowpass_profile(p.values(), f);
    for (std::size_t t = 0; t < k; ++t) mean[t] += profile[t];
  }
  for (double& v : mean) v /= static_cast<double>(days.size());
  clamp_negative(mean);

  MinedPattern out;
  out.candidate = {days.front().cell, normalize(std::span<const double>(mean), options.epsilon), days.size()};
  for (const auto& d : days)
    out.max_kl = std::max(out.max_kl, kl_divergence(out.candidate.pattern, comparison_vector(d, f, options)));
  out.accepted = out.max_kl < options.beta;
  return out;
}

std::map<CellIndex, MinedPattern> mine_patterns(const DemandSet& demands, const WaveletFilters& f,
                                                const MiningOptions& options) {
  std::map<CellIndex, MinedPattern> out;
  for (const auto& [cell, days] : demands.cells) {
    if (days.size() < 2) continue;
    out.emplace(cell, mine_pattern(days, f, options));
  }
  return out;
}

}  // namespace alcnn

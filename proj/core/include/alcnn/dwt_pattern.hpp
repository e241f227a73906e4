#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "alcnn/geo_grid.hpp"
#include "alcnn/wavelet.hpp"

namespace alcnn {

struct DemandPattern {
  CellIndex cell;
  ProbVector pattern;
  std::size_t support_days = 0;
};

// What each day's vector is compared against when testing the candidate
// pattern against the threshold.
enum class DayComparison {
  kRawDay,      // the day's counts, smoothed by the pseudo-count and normalised
  kDayProfile,  // the day's low-pass DWT profile, clamped, pseudo-count smoothed
};

struct MiningOptions {
  double beta = 0.11;
  double epsilon = kDefaultSmoothing;  // probability-space smoothing of the candidate
  double day_pseudocount = 0.5;        // added to each slot of a day before its KL test
  DayComparison comparison = DayComparison::kDayProfile;
};

struct MinedPattern {
  DemandPattern candidate;
  bool accepted = false;
  double max_kl = 0.0;  // max over days of KL(candidate || day)
};

// Low-pass profile of one length-k vector: idwt(approx(x), 0).
std::vector<double> lowpass_profile(std::span<const double> x, const WaveletFilters& f);

// Normalise each day, smooth each with the single-level low-pass DWT,
// average the profiles, clamp negatives, renormalise; accept iff
// KL(candidate || day) < beta for every day. Throws InsufficientData on
// fewer than two days.
MinedPattern mine_pattern(std::span<const DemandVector> days, const WaveletFilters& f,
                          const MiningOptions& options = {});

std::map<CellIndex, MinedPattern> mine_patterns(const DemandSet& demands, const WaveletFilters& f,
                                                const MiningOptions& options = {});

}  // namespace alcnn

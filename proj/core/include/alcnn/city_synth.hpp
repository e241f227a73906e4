#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alcnn/features.hpp"
#include "alcnn/geo_grid.hpp"
#include "alcnn/inference.hpp"

namespace alcnn {

enum class Archetype { kTransit, kBusiness, kResidential, kPark, kBackground };
inline constexpr std::size_t kArchetypeCount = 5;

std::string archetype_name(Archetype a);

// One Gaussian bump of a daily curve, in slot units.
struct Peak {
  double slot = 0.0;
  double width = 1.0;
  double height = 1.0;
};

// Floor plus bumps (wrapping around midnight), normalised over k slots.
ProbVector archetype_curve(std::span<const Peak> peaks, double floor, int slots);

// Canonical curve of each archetype at the given resolution. Peak slots
// are defined on a 48-slot day and rescaled for other k.
ProbVector archetype_pattern(Archetype a, int slots);

// Slots at which the transit archetype peaks.
std::array<int, 3> transit_peak_slots(int slots);

// Influence of one entity kind on a cell: strength / (1 + (dist/scale)^2)
// for dist <= cutoff (all in cell widths), 0 beyond.
struct Influence {
  double strength = 1.0;
  double scale = 1.0;
  double cutoff = 2.0;
};

struct SyntheticCitySpec {
  int rows = 20;
  int cols = 20;
  int slots = 48;
  int days = 28;
  double daily_intensity = 200.0;
  GeoPoint origin{121.40, 31.10};
  double cell_degrees = 0.01;
  std::int64_t first_day = 17296;  // 2017-05-10

  int transit_count = 12;
  int business_count = 5;
  int residential_count = 10;
  int park_count = 5;

  Influence transit{8.0, 0.7, 1.5};
  Influence business{1.5, 1.5, 3.0};
  Influence residential{2.0, 2.0, 3.5};
  Influence park{1.2, 1.0, 2.0};
  double background_weight = 0.25;

  double background_pois_per_cell = 0.2;
  double background_roads_per_cell = 0.02;
  FeatureConfig features;
};

void validate(const SyntheticCitySpec& spec);

struct Entity {
  Archetype kind = Archetype::kTransit;
  GeoPoint location;
  int level = 0;  // business level 1..4, else 0
};

struct SyntheticCity {
  SyntheticCitySpec spec;
  GridMap grid{BoundingBox{{0.0, 0.0}, {1.0, 1.0}}, 1, 1};
  CityData geo;
  std::vector<Entity> entities;
  std::map<CellIndex, std::array<double, kArchetypeCount>> mixture;  // sums to 1 per cell
  PatternMap planted;
  std::map<CellIndex, double> intensity;  // expected records per day
};

SyntheticCity generate_city(const SyntheticCitySpec& spec, std::uint64_t seed);

// Per cell, day and slot: Poisson(intensity * pattern[slot]) records with
// start points uniform in the cell and start times uniform in the slot.
std::vector<TripRecord> sample_records(const GridMap& grid, const PatternMap& planted,
                                       const std::map<CellIndex, double>& intensity, int days,
                                       std::int64_t first_day, std::uint64_t seed);

// Poisson variate from engine bits alone (no library distribution).
std::uint64_t poisson(std::mt19937_64& rng, double mean);

}  // namespace alcnn

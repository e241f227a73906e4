#include "alcnn/city_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "alcnn/error.hpp"
#include "alcnn/random.hpp"

namespace alcnn {

std::string archetype_name(Archetype a) {
  switch (a) {
    case Archetype::kTransit: return "transit";
    case Archetype::kBusiness: return "business";
    case Archetype::kResidential: return "residential";
    case Archetype::kPark: return "park";
    case Archetype::kBackground: return "background";
  }
  return "unknown";
}

ProbVector archetype_curve(std::span<const Peak> peaks, double floor, int slots) {
  if (slots < 2) throw InvalidInput("archetype needs at least 2 slots");
  std::vector<double> v(static_cast<std::size_t>(slots), floor);
  for (const auto& pk : peaks)
    for (int t = 0; t < slots; ++t) {
      double d = std::abs(t - pk.slot);
      d = std::min(d, slots - d);
      v[static_cast<std::size_t>(t)] += pk.height * std::exp(-0.5 * d * d / (pk.width * pk.width));
    }
  return normalize(std::span<const double>(v), kDefaultSmoothing);
}

namespace {

struct CurveDef {
  std::vector<Peak> peaks;  // 48-slot units
  double floor;
};

CurveDef curve_def(Archetype a) {
  switch (a) {
    case Archetype::kTransit: return {{{16, 1.4, 1.0}, {25, 1.4, 1.0}, {35, 1.4, 1.0}}, 0.08};
    case Archetype::kBusiness: return {{{23, 2.0, 1.0}, {40, 2.0, 0.9}}, 0.1};
    case Archetype::kResidential: return {{{13, 2.0, 0.9}, {38, 2.2, 1.0}}, 0.1};
    case Archetype::kPark: return {{{28, 6.0, 1.0}}, 0.25};
    case Archetype::kBackground: return {{{42, 3.0, 1.0}}, 0.15};
  }
  throw InvalidInput("unknown archetype");
}

}  // namespace

ProbVector archetype_pattern(Archetype a, int slots) {
  auto def = curve_def(a);
  const double s = slots / 48.0;
  for (auto& pk : def.peaks) {
    pk.slot *= s;
    pk.width *= s;
  }
  return archetype_curve(def.peaks, def.floor, slots);
}

std::array<int, 3> transit_peak_slots(int slots) {
  const auto def = curve_def(Archetype::kTransit);
  std::array<int, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = static_cast<int>(std::lround(def.peaks[i].slot * slots / 48.0));
  return out;
}

void validate(const SyntheticCitySpec& s) {
  if (s.rows < 1 || s.cols < 1) throw InvalidInput("synthetic grid needs rows, cols >= 1");
  if (s.slots < 2 || s.slots % 2 != 0 || kSecondsPerDay % s.slots != 0)
    throw InvalidInput("slots must be even and divide 86400");
  if (s.days < 1) throw InvalidInput("synthetic city needs at least one day");
  if (!(s.daily_intensity > 0.0)) throw InvalidInput("daily intensity must be > 0");
  if (!(s.cell_degrees > 0.0)) throw InvalidInput("cell size must be > 0");
  if (s.transit_count < 0 || s.business_count < 0 || s.residential_count < 0 || s.park_count < 0)
    throw InvalidInput("entity counts must be >= 0");
  for (const auto* inf : {&s.transit, &s.business, &s.residential, &s.park})
    if (!(inf->strength >= 0.0) || !(inf->scale > 0.0) || !(inf->cutoff >= 0.0))
      throw InvalidInput("influence parameters out of range");
  if (!(s.background_weight > 0.0)) throw InvalidInput("background weight must be > 0");
  const GeoPoint far{s.origin.lon + s.cols * s.cell_degrees, s.origin.lat + s.rows * s.cell_degrees};
  if (!is_valid(s.origin) || !is_valid(far)) throw InvalidInput("synthetic bounding box out of range");
}

namespace {

// Positions in cell units: x along columns, y along rows.
struct Pos {
  double x, y;
};

double dist(Pos a, Pos b) { return std::hypot(a.x - b.x, a.y - b.y); }

double min_separation(Archetype a, Archetype b) {
  if (a == b) {
    switch (a) {
      case Archetype::kTransit: return 2.5;
      case Archetype::kBusiness: return 4.0;
      case Archetype::kResidential: return 3.0;
      default: return 3.0;
    }
  }
  if (a == Archetype::kTransit || b == Archetype::kTransit) return 3.0;
  return 2.5;
}

double kernel(const Influence& inf, double d) {
  if (d > inf.cutoff) return 0.0;
  const double r = d / inf.scale;
  return inf.strength / (1.0 + r * r);
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on engine-defined uniforms.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

class Builder {
 public:
  Builder(const SyntheticCitySpec& spec, std::uint64_t seed) : s_(spec), rng_(seed) {}

  SyntheticCity build() {
    SyntheticCity city;
    city.spec = s_;
    city.grid = GridMap({s_.origin, to_geo({static_cast<double>(s_.cols), static_cast<double>(s_.rows)})}, s_.rows, s_.cols);
    place(Archetype::kTransit, s_.transit_count);
    place(Archetype::kBusiness, s_.business_count);
    place(Archetype::kResidential, s_.residential_count);
    place(Archetype::kPark, s_.park_count);
    for (std::size_t e = 0; e < pos_.size(); ++e) city.entities.push_back({kind_[e], to_geo(pos_[e]), level_[e]});

    plant(city);
    pois(city.geo);
    roads(city.geo);
    light(city);
    for (std::size_t e = 0; e < pos_.size(); ++e) {
      if (kind_[e] == Archetype::kTransit) city.geo.transport.points.push_back(to_geo(pos_[e]));
      if (kind_[e] == Archetype::kBusiness) {
        city.geo.business.points.push_back(to_geo(pos_[e]));
        city.geo.business.levels.push_back(level_[e]);
      }
    }
    return city;
  }

 private:
  GeoPoint to_geo(Pos p) const {
    return {s_.origin.lon + p.x * s_.cell_degrees, s_.origin.lat + p.y * s_.cell_degrees};
  }

  Pos random_pos(double margin) {
    return {uniform(rng_, margin, s_.cols - margin), uniform(rng_, margin, s_.rows - margin)};
  }

  void place(Archetype kind, int count) {
    constexpr int kAttempts = 2000;
    for (int n = 0; n < count; ++n) {
      Pos p = random_pos(0.5);
      for (int attempt = 0; attempt < kAttempts; ++attempt) {
        bool ok = true;
        for (std::size_t e = 0; e < pos_.size() && ok; ++e) ok = dist(p, pos_[e]) >= min_separation(kind, kind_[e]);
        if (ok) break;
        p = random_pos(0.5);
      }
      pos_.push_back(p);
      kind_.push_back(kind);
      level_.push_back(kind == Archetype::kBusiness ? 1 + static_cast<int>(uniform_index(rng_, 4)) : 0);
    }
  }

  const Influence& influence(Archetype a) const {
    switch (a) {
      case Archetype::kTransit: return s_.transit;
      case Archetype::kBusiness: return s_.business;
      case Archetype::kResidential: return s_.residential;
      default: return s_.park;
    }
  }

  void plant(SyntheticCity& city) const {
    std::array<ProbVector, kArchetypeCount> curves;
    for (std::size_t a = 0; a < kArchetypeCount; ++a) curves[a] = archetype_pattern(static_cast<Archetype>(a), s_.slots);
    for (int i = 0; i < s_.rows; ++i)
      for (int j = 0; j < s_.cols; ++j) {
        const Pos c{j + 0.5, i + 0.5};
        std::array<double, kArchetypeCount> w{};
        for (std::size_t e = 0; e < pos_.size(); ++e)
          w[static_cast<std::size_t>(kind_[e])] += kernel(influence(kind_[e]), dist(c, pos_[e]));
        w[static_cast<std::size_t>(Archetype::kBackground)] += s_.background_weight;
        double total = 0.0;
        for (double v : w) total += v;
        for (double& v : w) v /= total;
        std::vector<double> mix(static_cast<std::size_t>(s_.slots), 0.0);
        for (std::size_t a = 0; a < kArchetypeCount; ++a)
          for (std::size_t t = 0; t < mix.size(); ++t) mix[t] += w[a] * curves[a][t];
        const CellIndex cell{i, j};
        city.mixture.emplace(cell, w);
        city.planted.emplace(cell, normalize(std::span<const double>(mix), kDefaultSmoothing));
        city.intensity.emplace(cell, s_.daily_intensity);
      }
  }

  void scatter(std::vector<PoiRecord>& out, Pos centre, double sigma, int count, std::span<const int> categories) {
    for (int n = 0; n < count; ++n) {
      const Pos p{centre.x + sigma * gaussian(rng_), centre.y + sigma * gaussian(rng_)};
      out.push_back({to_geo(p), categories[uniform_index(rng_, categories.size())]});
    }
  }

  void pois(CityData& geo) {
    static constexpr int kTransitCats[] = {13, 13, 13, 1, 3};
    static constexpr int kBusinessCats[] = {16, 16, 14, 1, 3};
    static constexpr int kResidentialCats[] = {15, 15, 15, 9, 4};
    static constexpr int kParkCats[] = {6, 6, 8};
    const int C = s_.features.poi_categories;
    const auto background = static_cast<int>(std::lround(s_.background_pois_per_cell * s_.rows * s_.cols));
    for (int n = 0; n < background; ++n)
      geo.pois.push_back({to_geo(random_pos(0.0)), 1 + static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(C)))});
    for (std::size_t e = 0; e < pos_.size(); ++e) {
      switch (kind_[e]) {
        case Archetype::kTransit: scatter(geo.pois, pos_[e], 0.3, 10, kTransitCats); break;
        case Archetype::kBusiness: scatter(geo.pois, pos_[e], 0.8, 10 + 8 * level_[e], kBusinessCats); break;
        case Archetype::kResidential: scatter(geo.pois, pos_[e], 0.3, 30, kResidentialCats); break;
        case Archetype::kPark: scatter(geo.pois, pos_[e], 0.4, 10, kParkCats); break;
        default: break;
      }
    }
    for (auto& p : geo.pois) p.category = std::clamp(p.category, 1, C);
  }

  int level_between(int lo, int hi) {
    const int L = s_.features.road_levels;
    lo = std::min(lo, L);
    hi = std::min(hi, L);
    return lo + static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(hi - lo + 1)));
  }

  void segment(CityData& geo, Pos a, double angle, double length, int level) {
    const Pos b{a.x + length * std::cos(angle), a.y + length * std::sin(angle)};
    geo.roads.push_back({to_geo(a), to_geo(b), level});
  }

  void roads(CityData& geo) {
    // Arterials: straight lines split into two-cell pieces.
    for (int n = 0; n < 5; ++n) {
      const double y = uniform(rng_, 0.0, s_.rows), x = uniform(rng_, 0.0, s_.cols);
      const int hl = level_between(1, 4), vl = level_between(1, 4);
      for (double t = 0.0; t < s_.cols; t += 2.0) segment(geo, {t, y}, 0.0, std::min(2.0, s_.cols - t), hl);
      for (double t = 0.0; t < s_.rows; t += 2.0)
        segment(geo, {x, t}, std::numbers::pi / 2, std::min(2.0, s_.rows - t), vl);
    }
    for (std::size_t e = 0; e < pos_.size(); ++e) {
      const bool busy = kind_[e] == Archetype::kTransit || kind_[e] == Archetype::kBusiness;
      const int count = 4 + static_cast<int>(uniform_index(rng_, 5));
      for (int n = 0; n < count; ++n) {
        const Pos a{pos_[e].x + 0.8 * gaussian(rng_), pos_[e].y + 0.8 * gaussian(rng_)};
        segment(geo, a, uniform(rng_, 0.0, 2.0 * std::numbers::pi), uniform(rng_, 0.3, 1.2),
                busy ? level_between(5, 15) : level_between(10, 29));
      }
    }
    const int background = static_cast<int>(s_.background_roads_per_cell * s_.rows * s_.cols);
    for (int n = 0; n < background; ++n)
      segment(geo, random_pos(0.0), uniform(rng_, 0.0, 2.0 * std::numbers::pi), uniform(rng_, 0.2, 1.0),
              level_between(10, 29));
  }

  void light(SyntheticCity& city) {
    static constexpr Influence kGlow{1.0, 2.0, 5.0};
    for (int i = 0; i < s_.rows; ++i)
      for (int j = 0; j < s_.cols; ++j)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const Pos p{j + 0.25 + 0.5 * b + uniform(rng_, -0.1, 0.1), i + 0.25 + 0.5 * a + uniform(rng_, -0.1, 0.1)};
            double v = 5.0 + uniform(rng_, 0.0, 3.0);
            for (std::size_t e = 0; e < pos_.size(); ++e) {
              const double k = kernel(kGlow, dist(p, pos_[e]));
              switch (kind_[e]) {
                case Archetype::kBusiness: v += 40.0 * k * (0.5 + 0.25 * level_[e]); break;
                case Archetype::kTransit: v += 25.0 * k; break;
                case Archetype::kPark: v -= 10.0 * k; break;
                default: break;
              }
            }
            city.geo.light.push_back({to_geo(p), std::max(0.0, v)});
          }
    city.geo.light_centers = derive_light_centers(city.geo.light, city.grid);
  }

  const SyntheticCitySpec& s_;
  std::mt19937_64 rng_;
  std::vector<Pos> pos_;
  std::vector<Archetype> kind_;
  std::vector<int> level_;
};

}  // namespace

SyntheticCity generate_city(const SyntheticCitySpec& spec, std::uint64_t seed) {
  validate(spec);
  return Builder(spec, seed).build();
}

std::uint64_t poisson(std::mt19937_64& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidInput("Poisson mean must be finite and >= 0");
  // Knuth's product method on chunks of at most 30 (sums of Poissons are
  // Poisson), which keeps exp(-chunk) well away from underflow.
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = std::min(remaining, 30.0);
    remaining -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform01(rng);
    while (prod > limit) {
      ++total;
      prod *= uniform01(rng);
    }
  }
  return total;
}

std::vector<TripRecord> sample_records(const GridMap& grid, const PatternMap& planted,
                                       const std::map<CellIndex, double>& intensity, int days,
                                       std::int64_t first_day, std::uint64_t seed) {
  if (days < 0) throw InvalidInput("day count must be >= 0");
  std::mt19937_64 rng(seed);
  std::vector<TripRecord> out;
  for (const auto& [cell, pattern] : planted) {
    if (!grid.contains(cell)) throw InvalidInput("planted cell " + to_key(cell) + " outside the grid");
    const auto it = intensity.find(cell);
    const double rate = it == intensity.end() ? 0.0 : it->second;
    if (!(rate >= 0.0)) throw InvalidInput("intensity must be >= 0");
    if (rate == 0.0) continue;
    const auto bounds = grid.cell_bounds(cell);
    const auto k = static_cast<int>(pattern.size());
    if (kSecondsPerDay % k != 0) throw InvalidInput("pattern length must divide 86400");
    const std::int64_t slot_seconds = kSecondsPerDay / k;
    for (int d = 0; d < days; ++d)
      for (int t = 0; t < k; ++t) {
        const auto n = poisson(rng, rate * pattern[static_cast<std::size_t>(t)]);
        for (std::uint64_t r = 0; r < n; ++r) {
          TripRecord rec;
          rec.start = {uniform(rng, bounds.min.lon, bounds.max.lon), uniform(rng, bounds.min.lat, bounds.max.lat)};
          rec.start.lon = std::min(rec.start.lon, std::nextafter(bounds.max.lon, bounds.min.lon));
          rec.start.lat = std::min(rec.start.lat, std::nextafter(bounds.max.lat, bounds.min.lat));
          rec.start_time = (first_day + d) * kSecondsPerDay + t * slot_seconds +
                           static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(slot_seconds)));
          rec.end = {rec.start.lon + uniform(rng, -0.01, 0.01), rec.start.lat + uniform(rng, -0.01, 0.01)};
          rec.end_time = rec.start_time + 300 + static_cast<std::int64_t>(uniform_index(rng, 1500));
          out.push_back(rec);
        }
      }
  }
  return out;
}

}  // namespace alcnn

#include "alcnn/geo_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alcnn/error.hpp"

namespace alcnn {

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -90.0 && p.lat <= 90.0;
}

std::string to_key(const CellIndex& c) { return std::to_string(c.row) + "," + std::to_string(c.col); }

CellIndex cell_from_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw DataError("cell key '" + key + "' is not of the form \"i,j\"");
  try {
    std::size_t used_row = 0, used_col = 0;
    const int row = std::stoi(key.substr(0, comma), &used_row);
    const std::string col_text = key.substr(comma + 1);
    const int col = std::stoi(col_text, &used_col);
    if (used_row != comma || used_col != col_text.size()) throw std::invalid_argument(key);
    return {row, col};
  } catch (const std::logic_error&) {
    throw DataError("cell key '" + key + "' is not of the form \"i,j\"");
  }
}

GridMap::GridMap(const BoundingBox& bbox, int rows, int cols) : bbox_(bbox), rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw InvalidInput("grid needs rows >= 1 and cols >= 1");
  if (!is_valid(bbox.min) || !is_valid(bbox.max)) throw InvalidInput("bounding box corner out of range");
  if (!(bbox.min.lon < bbox.max.lon) || !(bbox.min.lat < bbox.max.lat))
    throw InvalidInput("degenerate bounding box: min must be strictly below max on both axes");
}

double GridMap::lat_edge(int row) const {
  if (row >= rows_) return bbox_.max.lat;
  return bbox_.min.lat + (bbox_.max.lat - bbox_.min.lat) * row / rows_;
}

double GridMap::lon_edge(int col) const {
  if (col >= cols_) return bbox_.max.lon;
  return bbox_.min.lon + (bbox_.max.lon - bbox_.min.lon) * col / cols_;
}

namespace {

// Index i with edge(i) <= x < edge(i+1). The arithmetic guess can be off by
// one near an edge, so it is corrected against the same edge formula that
// cell_bounds() uses.
template <typename Edge>
int bucket(double x, double lo, double step, int count, Edge edge) {
  int i = static_cast<int>(std::floor((x - lo) / step));
  i = std::clamp(i, 0, count - 1);
  while (i > 0 && x < edge(i)) --i;
  while (i + 1 < count && x >= edge(i + 1)) ++i;
  return i;
}

}  // namespace

std::optional<CellIndex> GridMap::locate(const GeoPoint& p) const {
  if (!(p.lat >= bbox_.min.lat && p.lat < bbox_.max.lat)) return std::nullopt;
  if (!(p.lon >= bbox_.min.lon && p.lon < bbox_.max.lon)) return std::nullopt;
  const int row = bucket(p.lat, bbox_.min.lat, lat_step(), rows_, [this](int i) { return lat_edge(i); });
  const int col = bucket(p.lon, bbox_.min.lon, lon_step(), cols_, [this](int j) { return lon_edge(j); });
  return CellIndex{row, col};
}

BoundingBox GridMap::cell_bounds(const CellIndex& c) const {
  return {{lon_edge(c.col), lat_edge(c.row)}, {lon_edge(c.col + 1), lat_edge(c.row + 1)}};
}

GeoPoint GridMap::cell_center(const CellIndex& c) const {
  const auto b = cell_bounds(c);
  return {0.5 * (b.min.lon + b.max.lon), 0.5 * (b.min.lat + b.max.lat)};
}

GridMap build_grid(const BoundingBox& bbox, int rows, int cols) { return GridMap(bbox, rows, cols); }

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("probability vector is empty");
  double sum = 0.0;
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("probability vector has a non-positive entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("probability vector does not sum to 1");
}

ProbVector ProbVector::uniform(std::size_t k) {
  return ProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

std::size_t DemandSet::total_count() const {
  std::size_t total = outside_count;
  for (const auto& [cell, days] : cells)
    for (const auto& d : days) total += std::accumulate(d.counts.begin(), d.counts.end(), std::size_t{0});
  return total;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_slots(int slots_per_day) {
  if (slots_per_day < 1 || kSecondsPerDay % slots_per_day != 0)
    throw InvalidInput("slots per day (" + std::to_string(slots_per_day) + ") must divide 86400");
}

}  // namespace

TimeSlot time_slot(std::int64_t epoch_seconds, int slots_per_day, std::int64_t utc_offset_seconds) {
  check_slots(slots_per_day);
  const std::int64_t local = epoch_seconds + utc_offset_seconds;
  const std::int64_t day = floor_div(local, kSecondsPerDay);
  const std::int64_t second_of_day = local - day * kSecondsPerDay;
  return {day, static_cast<int>(second_of_day / (kSecondsPerDay / slots_per_day))};
}

DemandSet aggregate_demands(std::span<const TripRecord> records, const GridMap& grid,
                            const AggregateOptions& options) {
  check_slots(options.slots_per_day);
  const int k = options.slots_per_day;

  struct Hit {
    std::size_t cell;
    TimeSlot when;
  };
  std::vector<Hit> hits;
  hits.reserve(records.size());

  DemandSet out;
  out.slots_per_day = k;
  std::int64_t first_day = 0, last_day = -1;
  if (options.day_range) {
    first_day = options.day_range->first;
    last_day = options.day_range->second;
    if (last_day < first_day) throw InvalidInput("day range is empty");
  }
  bool seen = false;
  for (const auto& r : records) {
    const auto cell = grid.locate(r.start);
    if (!cell) {
      ++out.outside_count;
      continue;
    }
    const TimeSlot when = time_slot(r.start_time, k, options.utc_offset_seconds);
    if (options.day_range && (when.day < first_day || when.day > last_day)) {
      ++out.outside_count;
      continue;
    }
    if (!options.day_range) {
      if (!seen || when.day < first_day) first_day = when.day;
      if (!seen || when.day > last_day) last_day = when.day;
      seen = true;
    }
    hits.push_back({grid.flat_index(*cell), when});
  }
  if (last_day < first_day) return out;

  const auto n_days = static_cast<std::size_t>(last_day - first_day + 1);
  std::vector<int> counts(grid.cell_count() * n_days * k, 0);
  for (const auto& h : hits) {
    const auto day = static_cast<std::size_t>(h.when.day - first_day);
    ++counts[(h.cell * n_days + day) * k + h.when.slot];
  }
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const CellIndex cell = grid.cell_at(c);
    auto& days = out.cells[cell];
    days.reserve(n_days);
    for (std::size_t d = 0; d < n_days; ++d) {
      const auto begin = counts.begin() + static_cast<std::ptrdiff_t>((c * n_days + d) * k);
      days.push_back({cell, first_day + static_cast<std::int64_t>(d), std::vector<int>(begin, begin + k)});
    }
  }
  return out;
}

ProbVector normalize(std::span<const int> counts, double epsilon) {
  std::vector<double> values(counts.begin(), counts.end());
  return normalize(std::span<const double>(values), epsilon);
}

ProbVector normalize(std::span<const double> values, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("smoothing epsilon must be > 0");
  if (values.empty()) throw InvalidInput("cannot normalize an empty vector");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0 || !std::isfinite(values[i])) throw InvalidInput("cannot normalize negative or non-finite entries");
    out[i] = values[i] + epsilon;
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return ProbVector(std::move(out));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw InvalidInput("KL divergence length mismatch: " + std::to_string(p.size()) + " vs " + std::to_string(q.size()));
  double kl = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) kl += p[t] * std::log(p[t] / q[t]);
  return kl;
}

double max_pairwise_divergence(std::span<const ProbVector> vectors) {
  if (vectors.size() < 2) throw InvalidInput("max pairwise divergence needs at least 2 vectors");
  double best = 0.0;
  for (std::size_t x = 0; x < vectors.size(); ++x)
    for (std::size_t y = 0; y < vectors.size(); ++y)
      if (x != y) best = std::max(best, kl_divergence(vectors[x], vectors[y]));
  return best;
}

DivergenceSummary divergence_histogram(const DemandSet& demands, std::span<const double> thresholds,
                                       double epsilon) {
  DivergenceSummary out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  for (const auto& [cell, days] : demands.cells) {
    if (days.size() < 2) {
      ++out.skipped_cells;
      continue;
    }
    std::vector<ProbVector> normalized;
    normalized.reserve(days.size());
    for (const auto& d : days) normalized.push_back(normalize(std::span<const int>(d.counts), epsilon));
    out.divergences.push_back(max_pairwise_divergence(normalized));
  }
  std::sort(out.divergences.begin(), out.divergences.end());
  for (double t : out.thresholds) {
    const auto below = std::upper_bound(out.divergences.begin(), out.divergences.end(), t) - out.divergences.begin();
    out.cumulative_fraction.push_back(out.divergences.empty() ? 0.0
                                                              : static_cast<double>(below) / out.divergences.size());
  }
  return out;
}

}  // namespace alcnn

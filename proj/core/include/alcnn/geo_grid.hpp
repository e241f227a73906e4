#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace alcnn {

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

struct BoundingBox {
  GeoPoint min;
  GeoPoint max;
};

// Row index runs along latitude (south to north), column index along
// longitude (west to east). Both are 0-based.
struct CellIndex {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

std::string to_key(const CellIndex& c);     // "i,j"
CellIndex cell_from_key(const std::string& key);

// Uniform n x m partition of a lat/lon rectangle. Cells are half-open,
// [lo, hi) on both axes, so a point on an interior edge belongs to the
// higher-index cell and the max corner lies outside the grid.
class GridMap {
 public:
  GridMap(const BoundingBox& bbox, int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(rows_) * cols_; }
  const BoundingBox& bbox() const { return bbox_; }

  double lat_step() const { return (bbox_.max.lat - bbox_.min.lat) / rows_; }
  double lon_step() const { return (bbox_.max.lon - bbox_.min.lon) / cols_; }

  // Edge coordinates; lat_edge(rows()) == bbox().max.lat exactly.
  double lat_edge(int row) const;
  double lon_edge(int col) const;

  std::optional<CellIndex> locate(const GeoPoint& p) const;
  BoundingBox cell_bounds(const CellIndex& c) const;
  GeoPoint cell_center(const CellIndex& c) const;

  bool contains(const CellIndex& c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }
  std::size_t flat_index(const CellIndex& c) const {
    return static_cast<std::size_t>(c.row) * cols_ + c.col;
  }
  CellIndex cell_at(std::size_t flat) const {
    return {static_cast<int>(flat / cols_), static_cast<int>(flat % cols_)};
  }

 private:
  BoundingBox bbox_;
  int rows_;
  int cols_;
};

GridMap build_grid(const BoundingBox& bbox, int rows, int cols);

struct TripRecord {
  GeoPoint start;
  std::int64_t start_time = 0;  // epoch seconds
  GeoPoint end;
  std::int64_t end_time = 0;
};

struct DemandVector {
  CellIndex cell;
  std::int64_t day = 0;  // days since epoch in the configured UTC offset
  std::vector<int> counts;
};

// Strictly positive probability vector summing to one (within 1e-9).
class ProbVector {
 public:
  ProbVector() = default;
  // Validates; throws InvalidInput on a non-positive entry or a bad sum.
  explicit ProbVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  static ProbVector uniform(std::size_t k);

 private:
  std::vector<double> values_;
};

inline constexpr double kDefaultSmoothing = 1e-6;
inline constexpr int kSecondsPerDay = 86400;

struct AggregateOptions {
  int slots_per_day = 48;
  std::int64_t utc_offset_seconds = 0;
  // Inclusive day range to materialise. Unset: the range spanned by the
  // in-bbox records. Every cell gets a vector for every day in range.
  std::optional<std::pair<std::int64_t, std::int64_t>> day_range;
};

struct DemandSet {
  int slots_per_day = 48;
  std::size_t outside_count = 0;
  std::map<CellIndex, std::vector<DemandVector>> cells;  // days ascending

  std::size_t total_count() const;
};

struct TimeSlot {
  std::int64_t day;
  int slot;
};
TimeSlot time_slot(std::int64_t epoch_seconds, int slots_per_day, std::int64_t utc_offset_seconds);

DemandSet aggregate_demands(std::span<const TripRecord> records, const GridMap& grid,
                            const AggregateOptions& options = {});

ProbVector normalize(std::span<const int> counts, double epsilon = kDefaultSmoothing);
ProbVector normalize(std::span<const double> values, double epsilon = kDefaultSmoothing);

double kl_divergence(std::span<const double> p, std::span<const double> q);
inline double kl_divergence(const ProbVector& p, const ProbVector& q) {
  return kl_divergence(p.values(), q.values());
}

// Max of KL(x || y) over ordered pairs of distinct positions.
double max_pairwise_divergence(std::span<const ProbVector> vectors);

struct DivergenceSummary {
  std::vector<double> divergences;          // ascending, one per usable cell
  std::vector<double> thresholds;
  std::vector<double> cumulative_fraction;  // fraction of cells with divergence <= threshold
  std::size_t skipped_cells = 0;            // cells with fewer than two days
};

DivergenceSummary divergence_histogram(const DemandSet& demands, std::span<const double> thresholds,
                                       double epsilon = kDefaultSmoothing);

}  // namespace alcnn

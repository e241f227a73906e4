#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "alcnn/geo_grid.hpp"

namespace alcnn {

inline constexpr double kEarthRadiusMeters = 6371000.0;

double haversine_meters(const GeoPoint& a, const GeoPoint& b);

struct PoiRecord {
  GeoPoint location;
  int category = 1;  // 1..C
};

struct RoadSegment {
  GeoPoint start;
  GeoPoint end;
  int level = 1;  // 1..L
};

struct LightSample {
  GeoPoint location;
  double intensity = 0.0;
};

// Transportation centres, light centres, business centres. `levels` is
// either empty or parallel to `points`.
struct PointSet {
  std::vector<GeoPoint> points;
  std::vector<int> levels;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

struct FeatureConfig {
  int poi_categories = 17;
  int road_levels = 29;
  double distance_sentinel_m = 50000.0;
};

struct CityData {
  std::vector<PoiRecord> pois;
  std::vector<RoadSegment> roads;
  std::vector<LightSample> light;
  PointSet light_centers;
  PointSet transport;
  PointSet business;
};

struct PoiFeatures {
  std::vector<double> counts;
  double total = 0.0;
  double entropy = 0.0;
};

struct RoadFeatures {
  std::vector<double> counts;
  double total = 0.0;
};

struct LightFeatures {
  double mean_intensity = 0.0;
  double center_distance_m = 0.0;
};

struct TransportFeatures {
  double count = 0.0;
  double distance_m = 0.0;
};

struct BusinessFeatures {
  double distance_m = 0.0;
  int level = 0;
};

PoiFeatures poi_features(std::span<const PoiRecord> pois, const GridMap& grid, const CellIndex& cell,
                         const FeatureConfig& cfg = {});

// Liang-Barsky clip of a segment against a half-open cell rectangle.
bool segment_intersects_cell(const RoadSegment& road, const GridMap& grid, const CellIndex& cell);

RoadFeatures road_features(std::span<const RoadSegment> roads, const GridMap& grid, const CellIndex& cell,
                           const FeatureConfig& cfg = {});

LightFeatures light_features(std::span<const LightSample> samples, const PointSet& centers, const GridMap& grid,
                             const CellIndex& cell, const FeatureConfig& cfg = {});

TransportFeatures transport_features(const PointSet& centers, const GridMap& grid, const CellIndex& cell,
                                     const FeatureConfig& cfg = {});

BusinessFeatures business_features(const PointSet& centers, const GridMap& grid, const CellIndex& cell,
                                   const FeatureConfig& cfg = {});

// Light centres as local maxima of the cell-averaged intensity grid whose
// value is at or above the given percentile of cell averages. Each centre
// is reported at its cell's centre point.
PointSet derive_light_centers(std::span<const LightSample> samples, const GridMap& grid, double percentile = 99.0);

// One row per cell in row-major (i, j) order; column layout:
//   poi_1..poi_C, p_num, p_en, road_1..road_L, r_num,
//   s_a, s_dis, t_num, t_dis, b_dis, b_level
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(int grid_rows, int grid_cols, std::vector<std::string> columns);

  int grid_rows() const { return grid_rows_; }
  int grid_cols() const { return grid_cols_; }
  std::size_t rows() const { return static_cast<std::size_t>(grid_rows_) * grid_cols_; }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  double& at(std::size_t row, std::size_t col) { return data_[row * columns_.size() + col]; }
  double at(std::size_t row, std::size_t col) const { return data_[row * columns_.size() + col]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> data() const { return data_; }

  std::size_t column_index(const std::string& name) const;  // throws DataError when absent

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  int grid_rows_ = 0;
  int grid_cols_ = 0;
  std::vector<std::string> columns_;
  std::vector<double> data_;
};

std::vector<std::string> feature_columns(const FeatureConfig& cfg = {});

FeatureMatrix build_feature_matrix(const CityData& city, const GridMap& grid, const FeatureConfig& cfg = {});

}  // namespace alcnn

#include "alcnn/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "alcnn/error.hpp"

namespace alcnn {

double haversine_meters(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kRad;
  const double dlon = (b.lon - a.lon) * kRad;
  const double s1 = std::sin(0.5 * dlat);
  const double s2 = std::sin(0.5 * dlon);
  const double h = s1 * s1 + std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * s2 * s2;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace {

void check_category(int category, int limit, const char* what) {
  if (category < 1 || category > limit)
    throw InvalidInput(std::string(what) + " " + std::to_string(category) + " outside [1, " + std::to_string(limit) + "]");
}

double entropy_of(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

struct Nearest {
  double distance;
  std::size_t index;
};

// Linear scan; strict < keeps the lowest index on ties.
Nearest nearest(const PointSet& set, const GeoPoint& from, double sentinel) {
  Nearest best{sentinel, set.size()};
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double d = haversine_meters(from, set.points[i]);
    if (best.index == set.size() || d < best.distance) best = {d, i};
  }
  return best;
}

// Sorted before summing so the result does not depend on input order.
double order_free_mean(std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

PoiFeatures poi_features(std::span<const PoiRecord> pois, const GridMap& grid, const CellIndex& cell,
                         const FeatureConfig& cfg) {
  PoiFeatures out;
  out.counts.assign(cfg.poi_categories, 0.0);
  for (const auto& poi : pois) {
    check_category(poi.category, cfg.poi_categories, "POI category");
    const auto at = grid.locate(poi.location);
    if (at && *at == cell) out.counts[poi.category - 1] += 1.0;
  }
  for (double c : out.counts) out.total += c;
  out.entropy = entropy_of(out.counts, out.total);
  return out;
}

bool segment_intersects_cell(const RoadSegment& road, const GridMap& grid, const CellIndex& cell) {
  const BoundingBox box = grid.cell_bounds(cell);
  const double x0 = road.start.lon, y0 = road.start.lat;
  const double dx = road.end.lon - x0, dy = road.end.lat - y0;
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x0 - box.min.lon, box.max.lon - x0, y0 - box.min.lat, box.max.lat - y0};
  for (int e = 0; e < 4; ++e) {
    if (p[e] == 0.0) {
      if (q[e] < 0.0) return false;
      continue;
    }
    const double r = q[e] / p[e];
    if (p[e] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  // The clipped piece [t0, t1] lies in the closed rectangle. Reject pieces
  // living only on the open (max) edges, which belong to the next cell.
  const double ax = x0 + t0 * dx, bx = x0 + t1 * dx;
  const double ay = y0 + t0 * dy, by = y0 + t1 * dy;
  if (ax >= box.max.lon && bx >= box.max.lon) return false;
  if (ay >= box.max.lat && by >= box.max.lat) return false;
  return true;
}

RoadFeatures road_features(std::span<const RoadSegment> roads, const GridMap& grid, const CellIndex& cell,
                           const FeatureConfig& cfg) {
  RoadFeatures out;
  out.counts.assign(cfg.road_levels, 0.0);
  for (const auto& road : roads) {
    check_category(road.level, cfg.road_levels, "road level");
    if (segment_intersects_cell(road, grid, cell)) out.counts[road.level - 1] += 1.0;
  }
  for (double c : out.counts) out.total += c;
  return out;
}

LightFeatures light_features(std::span<const LightSample> samples, const PointSet& centers, const GridMap& grid,
                             const CellIndex& cell, const FeatureConfig& cfg) {
  LightFeatures out;
  std::vector<double> inside;
  for (const auto& s : samples) {
    const auto at = grid.locate(s.location);
    if (at && *at == cell) inside.push_back(s.intensity);
  }
  out.mean_intensity = order_free_mean(inside);
  out.center_distance_m = nearest(centers, grid.cell_center(cell), cfg.distance_sentinel_m).distance;
  return out;
}

TransportFeatures transport_features(const PointSet& centers, const GridMap& grid, const CellIndex& cell,
                                     const FeatureConfig& cfg) {
  TransportFeatures out;
  for (const auto& p : centers.points) {
    const auto at = grid.locate(p);
    if (at && *at == cell) out.count += 1.0;
  }
  out.distance_m = nearest(centers, grid.cell_center(cell), cfg.distance_sentinel_m).distance;
  return out;
}

BusinessFeatures business_features(const PointSet& centers, const GridMap& grid, const CellIndex& cell,
                                   const FeatureConfig& cfg) {
  if (!centers.levels.empty() && centers.levels.size() != centers.points.size())
    throw InvalidInput("business centre levels are not parallel to points");
  const auto best = nearest(centers, grid.cell_center(cell), cfg.distance_sentinel_m);
  BusinessFeatures out;
  out.distance_m = best.distance;
  out.level = (best.index < centers.size() && !centers.levels.empty()) ? centers.levels[best.index] : 0;
  return out;
}

PointSet derive_light_centers(std::span<const LightSample> samples, const GridMap& grid, double percentile) {
  if (percentile < 0.0 || percentile > 100.0) throw InvalidInput("percentile must lie in [0, 100]");
  std::vector<double> sum(grid.cell_count(), 0.0);
  std::vector<std::size_t> count(grid.cell_count(), 0);
  for (const auto& s : samples) {
    if (const auto at = grid.locate(s.location)) {
      sum[grid.flat_index(*at)] += s.intensity;
      ++count[grid.flat_index(*at)];
    }
  }
  std::vector<double> mean(grid.cell_count(), 0.0);
  std::vector<double> observed;
  for (std::size_t c = 0; c < mean.size(); ++c) {
    if (count[c] == 0) continue;
    mean[c] = sum[c] / static_cast<double>(count[c]);
    observed.push_back(mean[c]);
  }
  PointSet out;
  if (observed.empty()) return out;
  std::sort(observed.begin(), observed.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * observed.size()));
  const double cutoff = observed[std::clamp<std::size_t>(rank, 1, observed.size()) - 1];

  for (std::size_t c = 0; c < mean.size(); ++c) {
    if (count[c] == 0 || mean[c] < cutoff) continue;
    const CellIndex at = grid.cell_at(c);
    bool is_max = true;
    for (int di = -1; di <= 1 && is_max; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        const CellIndex nb{at.row + di, at.col + dj};
        if ((di == 0 && dj == 0) || !grid.contains(nb)) continue;
        const std::size_t f = grid.flat_index(nb);
        // Ties go to the lower flat index so plateaus yield one centre.
        if (count[f] && (mean[f] > mean[c] || (mean[f] == mean[c] && f < c))) {
          is_max = false;
          break;
        }
      }
    if (is_max) out.points.push_back(grid.cell_center(at));
  }
  return out;
}

FeatureMatrix::FeatureMatrix(int grid_rows, int grid_cols, std::vector<std::string> columns)
    : grid_rows_(grid_rows), grid_cols_(grid_cols), columns_(std::move(columns)) {
  if (grid_rows < 1 || grid_cols < 1) throw InvalidInput("feature matrix needs a non-empty grid");
  data_.assign(rows() * columns_.size(), 0.0);
}

std::size_t FeatureMatrix::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw DataError("feature column '" + name + "' not present");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<std::string> feature_columns(const FeatureConfig& cfg) {
  std::vector<std::string> cols;
  for (int c = 1; c <= cfg.poi_categories; ++c) cols.push_back("poi_" + std::to_string(c));
  cols.insert(cols.end(), {"p_num", "p_en"});
  for (int l = 1; l <= cfg.road_levels; ++l) cols.push_back("road_" + std::to_string(l));
  cols.insert(cols.end(), {"r_num", "s_a", "s_dis", "t_num", "t_dis", "b_dis", "b_level"});
  return cols;
}

FeatureMatrix build_feature_matrix(const CityData& city, const GridMap& grid, const FeatureConfig& cfg) {
  if (cfg.poi_categories < 1 || cfg.road_levels < 1) throw InvalidInput("category counts must be positive");
  if (!city.business.levels.empty() && city.business.levels.size() != city.business.points.size())
    throw InvalidInput("business centre levels are not parallel to points");
  FeatureMatrix fm(grid.rows(), grid.cols(), feature_columns(cfg));
  const std::size_t C = cfg.poi_categories, L = cfg.road_levels;
  const std::size_t col_pnum = C, col_pen = C + 1, col_road = C + 2, col_rnum = C + 2 + L;
  const std::size_t col_sa = col_rnum + 1, col_sdis = col_sa + 1, col_tnum = col_sa + 2, col_tdis = col_sa + 3;
  const std::size_t col_bdis = col_sa + 4, col_blevel = col_sa + 5;

  for (const auto& poi : city.pois) {
    check_category(poi.category, cfg.poi_categories, "POI category");
    if (const auto at = grid.locate(poi.location)) fm.at(grid.flat_index(*at), poi.category - 1) += 1.0;
  }

  for (const auto& road : city.roads) {
    check_category(road.level, cfg.road_levels, "road level");
    // Candidate cells from the segment's bounding box, clamped to the grid.
    auto span_of = [](double a, double b, double lo, double step, int count) {
      const double mn = std::min(a, b), mx = std::max(a, b);
      const int first = std::clamp(static_cast<int>(std::floor((mn - lo) / step)) - 1, 0, count - 1);
      const int last = std::clamp(static_cast<int>(std::floor((mx - lo) / step)) + 1, 0, count - 1);
      return std::pair{first, last};
    };
    const auto [r0, r1] = span_of(road.start.lat, road.end.lat, grid.bbox().min.lat, grid.lat_step(), grid.rows());
    const auto [c0, c1] = span_of(road.start.lon, road.end.lon, grid.bbox().min.lon, grid.lon_step(), grid.cols());
    for (int i = r0; i <= r1; ++i)
      for (int j = c0; j <= c1; ++j)
        if (segment_intersects_cell(road, grid, {i, j})) fm.at(grid.flat_index({i, j}), col_road + road.level - 1) += 1.0;
  }

  std::vector<std::vector<double>> light_in_cell(grid.cell_count());
  for (const auto& s : city.light)
    if (const auto at = grid.locate(s.location)) light_in_cell[grid.flat_index(*at)].push_back(s.intensity);
  for (const auto& p : city.transport.points)
    if (const auto at = grid.locate(p)) fm.at(grid.flat_index(*at), col_tnum) += 1.0;

  for (std::size_t r = 0; r < fm.rows(); ++r) {
    const GeoPoint center = grid.cell_center(grid.cell_at(r));
    auto row = fm.row(r);
    double pnum = 0.0;
    for (std::size_t c = 0; c < C; ++c) pnum += row[c];
    row[col_pnum] = pnum;
    row[col_pen] = entropy_of(row.subspan(0, C), pnum);
    double rnum = 0.0;
    for (std::size_t l = 0; l < L; ++l) rnum += row[col_road + l];
    row[col_rnum] = rnum;
    row[col_sa] = order_free_mean(light_in_cell[r]);
    row[col_sdis] = nearest(city.light_centers, center, cfg.distance_sentinel_m).distance;
    row[col_tdis] = nearest(city.transport, center, cfg.distance_sentinel_m).distance;
    const auto b = nearest(city.business, center, cfg.distance_sentinel_m);
    row[col_bdis] = b.distance;
    row[col_blevel] =
        (b.index < city.business.size() && !city.business.levels.empty()) ? city.business.levels[b.index] : 0.0;
  }
  for (double v : fm.data())
    if (!std::isfinite(v)) throw NumericError("non-finite value in feature matrix");
  return fm;
}

}  // namespace alcnn

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "alcnn/error.hpp"
#include "alcnn/features.hpp"
#include "oracles.hpp"

namespace alcnn {
namespace {

const GridMap kGrid = build_grid({{121.0, 31.0}, {121.05, 31.05}}, 5, 5);

TEST(Haversine, OneDegreeOfLatitude) {
  EXPECT_NEAR(haversine_meters({0.0, 0.0}, {0.0, 1.0}), 6371000.0 * std::numbers::pi / 180.0, 1e-6);
  EXPECT_EQ(haversine_meters({121.3, 31.2}, {121.3, 31.2}), 0.0);
}

TEST(Poi, EmptyCell) {
  const auto f = poi_features({}, kGrid, {1, 1});
  EXPECT_EQ(f.total, 0.0);
  EXPECT_EQ(f.entropy, 0.0);
  EXPECT_EQ(std::count(f.counts.begin(), f.counts.end(), 0.0), 17);
}

TEST(Poi, SingleCategoryHasZeroEntropy) {
  const GeoPoint c = kGrid.cell_center({2, 3});
  const std::vector<PoiRecord> p(6, PoiRecord{c, 4});
  const auto f = poi_features(p, kGrid, {2, 3});
  EXPECT_EQ(f.counts[3], 6.0);
  EXPECT_EQ(f.total, 6.0);
  EXPECT_EQ(f.entropy, 0.0);
}

TEST(Poi, UniformCategoriesGiveLog17) {
  const GeoPoint c = kGrid.cell_center({0, 0});
  std::vector<PoiRecord> p;
  for (int k = 1; k <= 17; ++k)
    for (int r = 0; r < 3; ++r) p.push_back({c, k});
  const auto f = poi_features(p, kGrid, {0, 0});
  EXPECT_NEAR(f.entropy, std::log(17.0), 1e-12);
  EXPECT_NEAR(f.entropy, 2.833, 1e-3);
}

TEST(Poi, CategoryOutOfRange) {
  const std::vector<PoiRecord> p{{kGrid.cell_center({0, 0}), 18}};
  EXPECT_THROW(poi_features(p, kGrid, {0, 0}), InvalidInput);
}

TEST(Road, SegmentInsideOneCell) {
  const auto b = kGrid.cell_bounds({2, 2});
  const RoadSegment r{{b.min.lon + 0.001, b.min.lat + 0.001}, {b.min.lon + 0.008, b.min.lat + 0.009}, 1};
  int hits = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) hits += segment_intersects_cell(r, kGrid, {i, j});
  EXPECT_EQ(hits, 1);
  EXPECT_TRUE(segment_intersects_cell(r, kGrid, {2, 2}));
}

TEST(Road, SegmentCrossingTwoCells) {
  const GeoPoint a = kGrid.cell_center({1, 1}), b = kGrid.cell_center({1, 2});
  const RoadSegment r{a, b, 3};
  const CityData city{{}, {r}, {}, {}, {}, {}};
  const auto fm = build_feature_matrix(city, kGrid);
  const auto col = fm.column_index("road_3");
  double total = 0.0;
  for (std::size_t c = 0; c < fm.rows(); ++c) total += fm.at(c, col);
  EXPECT_EQ(total, 2.0);
  EXPECT_EQ(fm.at(kGrid.flat_index({1, 1}), col), 1.0);
  EXPECT_EQ(fm.at(kGrid.flat_index({1, 2}), col), 1.0);
}

TEST(Road, SegmentOnSharedEdgeBelongsToHigherCell) {
  const double lon = kGrid.lon_edge(2);
  const RoadSegment r{{lon, kGrid.lat_edge(1) + 0.002}, {lon, kGrid.lat_edge(1) + 0.006}, 1};
  EXPECT_TRUE(segment_intersects_cell(r, kGrid, {1, 2}));
  EXPECT_FALSE(segment_intersects_cell(r, kGrid, {1, 1}));
}

TEST(Road, RandomSegmentsAgainstSamplingOracle) {
  std::mt19937_64 rng(21);
  const auto& bb = kGrid.bbox();
  std::uniform_real_distribution<double> lon(bb.min.lon, bb.max.lon), lat(bb.min.lat, bb.max.lat);
  for (int n = 0; n < 100; ++n) {
    const RoadSegment r{{lon(rng), lat(rng)}, {lon(rng), lat(rng)}, 1};
    const auto sampled = testing::sampled_cells(r, kGrid, 1000);
    for (const auto& c : sampled) EXPECT_TRUE(segment_intersects_cell(r, kGrid, c));
    // A clipped cell missed by sampling must hold less than one sample gap.
    const double len = std::hypot(r.end.lon - r.start.lon, r.end.lat - r.start.lat);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        if (!segment_intersects_cell(r, kGrid, {i, j})) continue;
        if (std::find(sampled.begin(), sampled.end(), CellIndex{i, j}) != sampled.end()) continue;
        const auto b = kGrid.cell_bounds({i, j});
        double piece = 0.0;
        const int fine = 200000;
        for (int s = 0; s < fine; ++s) {
          const double t = (s + 0.5) / fine;
          const double x = r.start.lon + t * (r.end.lon - r.start.lon), y = r.start.lat + t * (r.end.lat - r.start.lat);
          if (x >= b.min.lon && x < b.max.lon && y >= b.min.lat && y < b.max.lat) piece += len / fine;
        }
        EXPECT_LT(piece, 2.0 * len / 999.0) << "cell " << i << "," << j;
      }
  }
}

TEST(Light, MeanAndEmptyCell) {
  const GeoPoint c = kGrid.cell_center({3, 3});
  const std::vector<LightSample> s{{c, 3.0}, {c, 5.0}};
  EXPECT_EQ(light_features(s, {}, kGrid, {3, 3}).mean_intensity, 4.0);
  EXPECT_EQ(light_features(s, {}, kGrid, {0, 0}).mean_intensity, 0.0);
  EXPECT_EQ(light_features(s, {}, kGrid, {0, 0}).center_distance_m, FeatureConfig{}.distance_sentinel_m);
}

TEST(Light, NearestCentreMatchesScan) {
  std::mt19937_64 rng(3);
  const auto city = testing::random_city(kGrid, rng);
  PointSet centres;
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (int n = 0; n < 20; ++n) centres.points.push_back({121.0 + u(rng), 31.0 + u(rng)});
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double best = 1e300;
      for (const auto& p : centres.points) best = std::min(best, haversine_meters(kGrid.cell_center({i, j}), p));
      EXPECT_EQ(light_features(city.light, centres, kGrid, {i, j}).center_distance_m, best);
    }
}

TEST(Transport, CentreAtCellCentre) {
  PointSet t;
  t.points.push_back(kGrid.cell_center({4, 1}));
  const auto f = transport_features(t, kGrid, {4, 1});
  EXPECT_EQ(f.count, 1.0);
  EXPECT_EQ(f.distance_m, 0.0);
}

TEST(Transport, CentresOutsideBoxCountNowhere) {
  PointSet t;
  t.points = {{120.0, 30.0}, {122.0, 32.0}};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_EQ(transport_features(t, kGrid, {i, j}).count, 0.0);
}

TEST(Transport, EmptySetGivesSentinel) {
  FeatureConfig cfg;
  cfg.distance_sentinel_m = 1234.0;
  const auto f = transport_features({}, kGrid, {0, 0}, cfg);
  EXPECT_EQ(f.count, 0.0);
  EXPECT_EQ(f.distance_m, 1234.0);
}

TEST(Business, SingleCentreLevelEverywhere) {
  PointSet b;
  b.points.push_back({121.013, 31.041});
  b.levels.push_back(3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_EQ(business_features(b, kGrid, {i, j}).level, 3);
}

TEST(Business, EquidistantTieTakesLowerIndex) {
  const GeoPoint c = kGrid.cell_center({2, 2});
  PointSet b;
  b.points = {{c.lon, c.lat + 0.004}, {c.lon, c.lat - 0.004}};
  b.levels = {4, 1};
  // Same latitude offset either way: distances differ only if the formula
  // is asymmetric in latitude, so check the tie really holds first.
  const double d0 = haversine_meters(c, b.points[0]), d1 = haversine_meters(c, b.points[1]);
  PointSet sym;
  sym.points = {{c.lon + 0.004, c.lat}, {c.lon - 0.004, c.lat}};
  sym.levels = {2, 1};
  ASSERT_EQ(haversine_meters(c, sym.points[0]), haversine_meters(c, sym.points[1]));
  EXPECT_EQ(business_features(sym, kGrid, {2, 2}).level, 2);
  std::swap(sym.levels[0], sym.levels[1]);
  EXPECT_EQ(business_features(sym, kGrid, {2, 2}).level, 1);
  EXPECT_EQ(business_features(b, kGrid, {2, 2}).level, d0 <= d1 ? 4 : 1);
}

TEST(Business, EmptySet) {
  const auto f = business_features({}, kGrid, {0, 0});
  EXPECT_EQ(f.level, 0);
  EXPECT_EQ(f.distance_m, FeatureConfig{}.distance_sentinel_m);
}

TEST(Matrix, ColumnCount) {
  const auto fm = build_feature_matrix({}, build_grid({{0, 0}, {1, 1}}, 2, 2));
  EXPECT_EQ(fm.cols(), 17u + 2 + 29 + 1 + 2 + 2 + 2);
  EXPECT_EQ(fm.cols(), 55u);
  EXPECT_EQ(fm.rows(), 4u);
  EXPECT_EQ(fm.columns().front(), "poi_1");
  EXPECT_EQ(fm.columns().back(), "b_level");
}

TEST(Matrix, EmptyCityIsZeroOrSentinel) {
  const auto fm = build_feature_matrix({}, kGrid);
  for (std::size_t r = 0; r < fm.rows(); ++r)
    for (std::size_t c = 0; c < fm.cols(); ++c) {
      const double v = fm.at(r, c);
      EXPECT_TRUE(v == 0.0 || v == FeatureConfig{}.distance_sentinel_m) << fm.columns()[c];
    }
}

TEST(Matrix, RecordOrderDoesNotMatter) {
  std::mt19937_64 rng(13);
  auto city = testing::random_city(kGrid, rng);
  const auto a = build_feature_matrix(city, kGrid);
  std::shuffle(city.pois.begin(), city.pois.end(), rng);
  std::shuffle(city.roads.begin(), city.roads.end(), rng);
  std::shuffle(city.light.begin(), city.light.end(), rng);
  std::shuffle(city.transport.points.begin(), city.transport.points.end(), rng);
  EXPECT_EQ(build_feature_matrix(city, kGrid), a);
}

TEST(Matrix, MatchesLinearScanOracle) {
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    std::mt19937_64 rng(seed);
    const FeatureConfig cfg;
    const auto city = testing::random_city(kGrid, rng, cfg);
    const auto fm = build_feature_matrix(city, kGrid, cfg);
    for (std::size_t r = 0; r < fm.rows(); ++r) {
      const auto o = testing::scan_cell(city, kGrid, kGrid.cell_at(r), cfg);
      for (int k = 0; k < 17; ++k) ASSERT_EQ(fm.at(r, k), o.poi_counts[k]);
      for (int l = 0; l < 29; ++l) ASSERT_EQ(fm.at(r, 19 + l), o.road_counts[l]);
      EXPECT_EQ(fm.at(r, fm.column_index("p_num")), o.poi_total);
      EXPECT_EQ(fm.at(r, fm.column_index("r_num")), o.road_total);
      EXPECT_EQ(fm.at(r, fm.column_index("s_a")), o.light_mean);
      EXPECT_EQ(fm.at(r, fm.column_index("s_dis")), o.light_distance);
      EXPECT_EQ(fm.at(r, fm.column_index("t_num")), o.transport_count);
      EXPECT_EQ(fm.at(r, fm.column_index("t_dis")), o.transport_distance);
      EXPECT_EQ(fm.at(r, fm.column_index("b_dis")), o.business_distance);
      EXPECT_EQ(fm.at(r, fm.column_index("b_level")), o.business_level);
      const double h = fm.at(r, fm.column_index("p_en"));
      EXPECT_GE(h, 0.0);
      EXPECT_LE(h, std::log(17.0) + 1e-12);
    }
  }
}

TEST(LightCentres, PeakCellIsFound) {
  std::vector<LightSample> s;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) s.push_back({kGrid.cell_center({i, j}), (i == 3 && j == 1) ? 90.0 : 1.0 + i + j});
  const auto c = derive_light_centers(s, kGrid, 99.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(kGrid.locate(c.points[0]), (CellIndex{3, 1}));
  // A lower percentile also admits the corner maximum at (4,4).
  EXPECT_EQ(derive_light_centers(s, kGrid, 95.0).size(), 2u);
}

}  // namespace
}  // namespace alcnn

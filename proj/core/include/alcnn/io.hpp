#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alcnn/baselines.hpp"
#include "alcnn/copca.hpp"
#include "alcnn/dwt_pattern.hpp"
#include "alcnn/features.hpp"
#include "alcnn/geo_grid.hpp"
#include "alcnn/inference.hpp"
#include "alcnn/trainer.hpp"

namespace alcnn::io {

namespace fs = std::filesystem;

// Writes to a sibling temporary file, then renames over `path`, so a
// failed run never leaves a partial file behind.
void write_file_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

// Shortest text that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  fs::path source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Position of a column; throws DataError naming the file and column.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
  long long integer(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(const std::string& text, const fs::path& source = {});
CsvTable read_csv(const fs::path& path);

// "2017-05-10T08:30:00", "2017-05-10 08:30:00", optional fraction and
// "Z" or "+hh:mm" suffix. Throws DataError on anything else.
std::int64_t parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t epoch_seconds);

// Header start_lon,start_lat,start_time,end_lon,end_lat,end_time. Each time
// column is read as epoch seconds if its first value is numeric, else ISO.
std::vector<TripRecord> read_trips(const fs::path& path);
std::string trips_csv(const std::vector<TripRecord>& records);

// poi.csv, roads.csv, light.csv, light_centers.csv, transport.csv,
// business.csv in one directory. light_centers.csv may be absent, in which
// case the centres are derived from the light samples.
CityData read_city_data(const fs::path& dir, const GridMap& grid, const FeatureConfig& cfg = {});
void write_city_data(const fs::path& dir, const CityData& city);

// Grid and calendar of one city (city.json).
struct CityMeta {
  BoundingBox bbox;
  int rows = 0;
  int cols = 0;
  int slots = 48;
  std::int64_t first_day = 0;
  int days = 0;
  std::int64_t utc_offset_seconds = 0;
};
std::string city_meta_json(const CityMeta& meta);
CityMeta read_city_meta(const fs::path& path);

std::string demands_json(const DemandSet& demands);
DemandSet read_demands(const fs::path& path);

std::string patterns_json(const std::map<CellIndex, MinedPattern>& patterns);
std::string patterns_json(const PatternMap& patterns, std::size_t support_days);
std::map<CellIndex, MinedPattern> read_patterns(const fs::path& path);

std::string divergence_csv(const DivergenceSummary& summary);

std::string feature_csv(const FeatureMatrix& features);
FeatureMatrix read_features(const fs::path& path);

std::string transform_json(const CoPcaTransform& t);
CoPcaTransform read_transform(const fs::path& path);

// Latent rows with leading i,j columns.
std::string latent_csv(const Eigen::MatrixXd& latent, const GridMap& grid);

// One file per fitted method; "method" is alcnn, lr or knn.
struct Checkpoint {
  std::string method;
  std::uint64_t seed = 0;
  std::optional<TrainConfig> config;  // alcnn
  std::optional<ModelParams> params;  // alcnn
  std::optional<RidgePatternModel> ridge;
  // knn
  Eigen::MatrixXd knn_features;
  std::vector<ProbVector> knn_patterns;
  int knn_k = 10;
};

std::string checkpoint_json(const Checkpoint& ckpt);
Checkpoint read_checkpoint(const fs::path& path);

std::string training_log_csv(const std::vector<EpochLog>& log);
std::vector<EpochLog> read_training_log(const fs::path& path);

std::string attention_csv(const std::map<CellIndex, std::vector<double>>& attention, const std::vector<int>& scales);

struct ReportRow {
  std::string method;
  double klmse = 0.0;
  std::size_t cells = 0;
  std::size_t skipped = 0;
};
std::string report_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report(const fs::path& path);

std::string per_cell_kl_csv(const std::map<std::string, EvaluationReport>& reports);

}  // namespace alcnn::io

#include "alcnn/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "alcnn/error.hpp"

namespace alcnn::io {

using json = nlohmann::ordered_json;

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw DataError("failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  if (!std::isfinite(v)) throw NumericError("refusing to serialise a non-finite value");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

std::string where(const fs::path& source) { return source.empty() ? std::string("<csv>") : source.string(); }

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DataError(where(source) + ": missing column '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const auto v = to_number(rows[row][col]);
  if (!v || !std::isfinite(*v))
    throw DataError(where(source) + ": row " + std::to_string(row + 2) + " column '" + header[col] +
                    "': not a finite number: '" + rows[row][col] + "'");
  return *v;
}

long long CsvTable::integer(std::size_t row, std::size_t col) const {
  const std::string& s = rows[row][col];
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
    throw DataError(where(source) + ": row " + std::to_string(row + 2) + " column '" + header[col] +
                    "': not an integer: '" + s + "'");
  return v;
}

CsvTable parse_csv(const std::string& text, const fs::path& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw DataError(where(source) + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError(where(source) + ": empty file, header expected");
  return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path), path); }

std::int64_t parse_iso8601(const std::string& text) {
  using namespace std::chrono;
  const auto fail = [&text]() -> std::int64_t { throw DataError("not an ISO-8601 timestamp: '" + text + "'"); };
  const std::string& s = text;
  auto digits = [&s](std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
      v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
  };
  int Y, M, D, h, m, sec;
  if (!digits(0, 4, Y) || s.size() < 19 || s[4] != '-' || !digits(5, 2, M) || s[7] != '-' || !digits(8, 2, D) ||
      (s[10] != 'T' && s[10] != ' ') || !digits(11, 2, h) || s[13] != ':' || !digits(14, 2, m) || s[16] != ':' ||
      !digits(17, 2, sec))
    return fail();
  const year_month_day ymd{year{Y}, month{static_cast<unsigned>(M)}, day{static_cast<unsigned>(D)}};
  if (!ymd.ok() || h > 23 || m > 59 || sec > 60) return fail();
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return fail();
  }
  std::int64_t offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '+' ? 1 : -1;
      int oh, om;
      if (!digits(pos + 1, 2, oh)) return fail();
      std::size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      if (!digits(mpos, 2, om) || mpos + 2 != s.size() || oh > 23 || om > 59) return fail();
      offset = sign * (oh * 3600 + om * 60);
      pos = s.size();
    } else {
      return fail();
    }
  }
  if (pos != s.size()) return fail();
  const auto days = sys_days(ymd).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + m * 60 + sec - offset;
}

std::string format_iso8601(std::int64_t t) {
  using namespace std::chrono;
  const std::int64_t day = t >= 0 ? t / 86400 : -((-t + 86399) / 86400);
  const std::int64_t rem = t - day * 86400;
  const year_month_day ymd{sys_days{days{day}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

std::vector<TripRecord> read_trips(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t slon = t.column("start_lon"), slat = t.column("start_lat"), stime = t.column("start_time");
  const std::size_t elon = t.column("end_lon"), elat = t.column("end_lat"), etime = t.column("end_time");
  std::vector<TripRecord> out;
  out.reserve(t.rows.size());
  if (t.rows.empty()) return out;
  const bool start_epoch = to_number(t.rows.front()[stime]).has_value();
  const bool end_epoch = to_number(t.rows.front()[etime]).has_value();
  auto time_of = [&t, &path](std::size_t r, std::size_t c, bool epoch) -> std::int64_t {
    if (epoch) return static_cast<std::int64_t>(std::floor(t.number(r, c)));
    try {
      return parse_iso8601(t.rows[r][c]);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": row " + std::to_string(r + 2) + " column '" + t.header[c] + "': " + e.what());
    }
  };
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    TripRecord rec;
    rec.start = {t.number(r, slon), t.number(r, slat)};
    rec.end = {t.number(r, elon), t.number(r, elat)};
    rec.start_time = time_of(r, stime, start_epoch);
    rec.end_time = time_of(r, etime, end_epoch);
    if (!is_valid(rec.start) || !is_valid(rec.end))
      throw DataError(path.string() + ": row " + std::to_string(r + 2) + ": coordinate out of range");
    if (rec.end_time < rec.start_time)
      throw DataError(path.string() + ": row " + std::to_string(r + 2) + ": end_time before start_time");
    out.push_back(rec);
  }
  return out;
}

std::string trips_csv(const std::vector<TripRecord>& records) {
  std::string s = "start_lon,start_lat,start_time,end_lon,end_lat,end_time\n";
  s.reserve(records.size() * 72 + s.size());
  for (const auto& r : records) {
    s += format_double(r.start.lon) + ',' + format_double(r.start.lat) + ',' + std::to_string(r.start_time) + ',' +
         format_double(r.end.lon) + ',' + format_double(r.end.lat) + ',' + std::to_string(r.end_time) + '\n';
  }
  return s;
}

namespace {

GeoPoint point_at(const CsvTable& t, std::size_t r, std::size_t lon, std::size_t lat) {
  const GeoPoint p{t.number(r, lon), t.number(r, lat)};
  if (!is_valid(p)) throw DataError(t.source.string() + ": row " + std::to_string(r + 2) + ": coordinate out of range");
  return p;
}

int bounded_int(const CsvTable& t, std::size_t r, std::size_t c, int lo, int hi) {
  const long long v = t.integer(r, c);
  if (v < lo || v > hi)
    throw DataError(t.source.string() + ": row " + std::to_string(r + 2) + " column '" + t.header[c] + "': value " +
                    std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

PointSet read_points(const fs::path& path, bool with_level) {
  const CsvTable t = read_csv(path);
  const std::size_t lon = t.column("lon"), lat = t.column("lat");
  const std::size_t level = with_level ? t.column("level") : 0;
  PointSet out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.points.push_back(point_at(t, r, lon, lat));
    if (with_level) out.levels.push_back(bounded_int(t, r, level, 0, 1000000));
  }
  return out;
}

std::string points_csv(const PointSet& p, bool with_level) {
  std::string s = with_level ? "lon,lat,level\n" : "lon,lat\n";
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    s += format_double(p.points[i].lon) + ',' + format_double(p.points[i].lat);
    if (with_level) s += ',' + std::to_string(p.levels.at(i));
    s += '\n';
  }
  return s;
}

}  // namespace

CityData read_city_data(const fs::path& dir, const GridMap& grid, const FeatureConfig& cfg) {
  CityData city;
  {
    const CsvTable t = read_csv(dir / "poi.csv");
    const std::size_t lon = t.column("lon"), lat = t.column("lat"), cat = t.column("category");
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      city.pois.push_back({point_at(t, r, lon, lat), bounded_int(t, r, cat, 1, cfg.poi_categories)});
  }
  {
    const CsvTable t = read_csv(dir / "roads.csv");
    const std::size_t lon1 = t.column("lon1"), lat1 = t.column("lat1"), lon2 = t.column("lon2"),
                      lat2 = t.column("lat2"), level = t.column("level");
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      city.roads.push_back(
          {point_at(t, r, lon1, lat1), point_at(t, r, lon2, lat2), bounded_int(t, r, level, 1, cfg.road_levels)});
  }
  {
    const CsvTable t = read_csv(dir / "light.csv");
    const std::size_t lon = t.column("lon"), lat = t.column("lat"), v = t.column("intensity");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double intensity = t.number(r, v);
      if (intensity < 0.0)
        throw DataError(t.source.string() + ": row " + std::to_string(r + 2) + ": negative light intensity");
      city.light.push_back({point_at(t, r, lon, lat), intensity});
    }
  }
  city.light_centers = fs::exists(dir / "light_centers.csv") ? read_points(dir / "light_centers.csv", false)
                                                              : derive_light_centers(city.light, grid);
  city.transport = read_points(dir / "transport.csv", false);
  city.business = read_points(dir / "business.csv", true);
  return city;
}

void write_city_data(const fs::path& dir, const CityData& city) {
  std::string poi = "lon,lat,category\n";
  for (const auto& p : city.pois)
    poi += format_double(p.location.lon) + ',' + format_double(p.location.lat) + ',' + std::to_string(p.category) + '\n';
  std::string roads = "lon1,lat1,lon2,lat2,level\n";
  for (const auto& r : city.roads)
    roads += format_double(r.start.lon) + ',' + format_double(r.start.lat) + ',' + format_double(r.end.lon) + ',' +
             format_double(r.end.lat) + ',' + std::to_string(r.level) + '\n';
  std::string light = "lon,lat,intensity\n";
  for (const auto& l : city.light)
    light += format_double(l.location.lon) + ',' + format_double(l.location.lat) + ',' + format_double(l.intensity) + '\n';
  write_file_atomic(dir / "poi.csv", poi);
  write_file_atomic(dir / "roads.csv", roads);
  write_file_atomic(dir / "light.csv", light);
  write_file_atomic(dir / "light_centers.csv", points_csv(city.light_centers, false));
  write_file_atomic(dir / "transport.csv", points_csv(city.transport, false));
  write_file_atomic(dir / "business.csv", points_csv(city.business, true));
}

namespace {

json parse_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

template <typename F>
auto schema(const fs::path& path, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

json matrix_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
    throw DataError("matrix data length does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)].get<double>();
  return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

}  // namespace

std::string city_meta_json(const CityMeta& m) {
  const json j = {{"bbox", {{"min_lon", m.bbox.min.lon}, {"min_lat", m.bbox.min.lat}, {"max_lon", m.bbox.max.lon}, {"max_lat", m.bbox.max.lat}}},
                  {"rows", m.rows},
                  {"cols", m.cols},
                  {"slots", m.slots},
                  {"first_day", m.first_day},
                  {"days", m.days},
                  {"utc_offset_seconds", m.utc_offset_seconds}};
  return dump(j);
}

CityMeta read_city_meta(const fs::path& path) {
  const json j = parse_json(path);
  return schema(path, [&] {
    CityMeta m;
    const auto& b = j.at("bbox");
    m.bbox = {{b.at("min_lon").get<double>(), b.at("min_lat").get<double>()},
              {b.at("max_lon").get<double>(), b.at("max_lat").get<double>()}};
    m.rows = j.at("rows").get<int>();
    m.cols = j.at("cols").get<int>();
    m.slots = j.value("slots", 48);
    m.first_day = j.value("first_day", std::int64_t{0});
    m.days = j.value("days", 0);
    m.utc_offset_seconds = j.value("utc_offset_seconds", std::int64_t{0});
    return m;
  });
}

std::string demands_json(const DemandSet& demands) {
  json j = json::object();
  for (const auto& [cell, days] : demands.cells) {
    json arr = json::array();
    for (const auto& d : days) arr.push_back({{"day", d.day}, {"counts", d.counts}});
    j[to_key(cell)] = std::move(arr);
  }
  return dump(j);
}

DemandSet read_demands(const fs::path& path) {
  const json j = parse_json(path);
  return schema(path, [&] {
    if (!j.is_object()) throw DataError(path.string() + ": expected an object keyed by \"i,j\"");
    DemandSet out;
    int k = -1;
    for (const auto& [key, arr] : j.items()) {
      const CellIndex cell = cell_from_key(key);
      auto& days = out.cells[cell];
      for (const auto& d : arr) {
        DemandVector v{cell, d.at("day").get<std::int64_t>(), d.at("counts").get<std::vector<int>>()};
        if (k < 0) k = static_cast<int>(v.counts.size());
        if (static_cast<int>(v.counts.size()) != k)
          throw DataError(path.string() + ": cell " + key + " has a demand vector of length " +
                          std::to_string(v.counts.size()) + ", expected " + std::to_string(k));
        for (int c : v.counts)
          if (c < 0) throw DataError(path.string() + ": cell " + key + " has a negative count");
        days.push_back(std::move(v));
      }
      std::sort(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.day < b.day; });
    }
    out.slots_per_day = k < 0 ? 48 : k;
    return out;
  });
}

std::string patterns_json(const std::map<CellIndex, MinedPattern>& patterns) {
  json j = json::object();
  for (const auto& [cell, m] : patterns)
    j[to_key(cell)] = {{"pattern", std::vector<double>(m.candidate.pattern.begin(), m.candidate.pattern.end())},
                       {"support_days", m.candidate.support_days},
                       {"accepted", m.accepted},
                       {"max_kl", m.max_kl}};
  return dump(j);
}

std::string patterns_json(const PatternMap& patterns, std::size_t support_days) {
  std::map<CellIndex, MinedPattern> m;
  for (const auto& [cell, p] : patterns) m.emplace(cell, MinedPattern{{cell, p, support_days}, true, 0.0});
  return patterns_json(m);
}

std::map<CellIndex, MinedPattern> read_patterns(const fs::path& path) {
  const json j = parse_json(path);
  return schema(path, [&] {
    if (!j.is_object()) throw DataError(path.string() + ": expected an object keyed by \"i,j\"");
    std::map<CellIndex, MinedPattern> out;
    for (const auto& [key, v] : j.items()) {
      const CellIndex cell = cell_from_key(key);
      MinedPattern m;
      try {
        m.candidate = {cell, ProbVector(v.at("pattern").get<std::vector<double>>()), v.value("support_days", std::size_t{0})};
      } catch (const InvalidInput& e) {
        throw DataError(path.string() + ": cell " + key + ": " + e.what());
      }
      m.accepted = v.value("accepted", true);
      m.max_kl = v.value("max_kl", 0.0);
      out.emplace(cell, std::move(m));
    }
    return out;
  });
}

std::string divergence_csv(const DivergenceSummary& s) {
  std::string out = "threshold,cumulative_fraction\n";
  for (std::size_t i = 0; i < s.thresholds.size(); ++i)
    out += format_double(s.thresholds[i]) + ',' + format_double(s.cumulative_fraction[i]) + '\n';
  return out;
}

std::string feature_csv(const FeatureMatrix& f) {
  std::string s = "i,j";
  for (const auto& c : f.columns()) s += ',' + c;
  s += '\n';
  for (std::size_t r = 0; r < f.rows(); ++r) {
    s += std::to_string(r / static_cast<std::size_t>(f.grid_cols())) + ',' +
         std::to_string(r % static_cast<std::size_t>(f.grid_cols()));
    for (double v : f.row(r)) s += ',' + format_double(v);
    s += '\n';
  }
  return s;
}

FeatureMatrix read_features(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 3 || t.header[0] != "i" || t.header[1] != "j")
    throw DataError(path.string() + ": feature CSV must start with columns i,j and name at least one feature");
  int rows = 0, cols = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    rows = std::max(rows, static_cast<int>(t.integer(r, 0)) + 1);
    cols = std::max(cols, static_cast<int>(t.integer(r, 1)) + 1);
  }
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != t.rows.size() || t.rows.empty())
    throw DataError(path.string() + ": expected one row per cell of a complete grid");
  FeatureMatrix f(rows, cols, std::vector<std::string>(t.header.begin() + 2, t.header.end()));
  std::vector<bool> seen(t.rows.size(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const long long i = t.integer(r, 0), j = t.integer(r, 1);
    if (i < 0 || j < 0) throw DataError(path.string() + ": negative cell index on row " + std::to_string(r + 2));
    const auto flat = static_cast<std::size_t>(i * cols + j);
    if (seen[flat]) throw DataError(path.string() + ": duplicate cell " + std::to_string(i) + "," + std::to_string(j));
    seen[flat] = true;
    for (std::size_t c = 2; c < t.header.size(); ++c) f.at(flat, c - 2) = t.number(r, c);
  }
  return f;
}

std::string transform_json(const CoPcaTransform& t) {
  const json j = {{"columns", t.columns},
                  {"means", vector_json(t.means)},
                  {"scales", vector_json(t.scales)},
                  {"projection", matrix_json(t.projection)},
                  {"explained_variance", vector_json(t.explained_variance)}};
  return dump(j);
}

CoPcaTransform read_transform(const fs::path& path) {
  const json j = parse_json(path);
  return schema(path, [&] {
    CoPcaTransform t;
    t.columns = j.at("columns").get<std::vector<std::string>>();
    t.means = vector_from(j.at("means"));
    t.scales = vector_from(j.at("scales"));
    t.projection = matrix_from(j.at("projection"));
    t.explained_variance = vector_from(j.at("explained_variance"));
    const auto d = static_cast<Eigen::Index>(t.columns.size());
    if (t.means.size() != d || t.scales.size() != d || t.projection.rows() != d ||
        t.explained_variance.size() != t.projection.cols())
      throw DataError(path.string() + ": transform arrays disagree in size");
    return t;
  });
}

std::string latent_csv(const Eigen::MatrixXd& latent, const GridMap& grid) {
  std::string s = "i,j";
  for (Eigen::Index c = 0; c < latent.cols(); ++c) s += ",z" + std::to_string(c + 1);
  s += '\n';
  for (Eigen::Index r = 0; r < latent.rows(); ++r) {
    const CellIndex cell = grid.cell_at(static_cast<std::size_t>(r));
    s += std::to_string(cell.row) + ',' + std::to_string(cell.col);
    for (Eigen::Index c = 0; c < latent.cols(); ++c) s += ',' + format_double(latent(r, c));
    s += '\n';
  }
  return s;
}

namespace {

const char* direction_name(KlDirection d) {
  return d == KlDirection::kTargetToPrediction ? "target_to_prediction" : "prediction_to_target";
}

KlDirection direction_from(const std::string& s) {
  if (s == "target_to_prediction") return KlDirection::kTargetToPrediction;
  if (s == "prediction_to_target") return KlDirection::kPredictionToTarget;
  throw DataError("unknown KL direction '" + s + "'");
}

json config_json(const TrainConfig& c) {
  return {{"latent_dim", c.shape.latent_dim},
          {"slots", c.shape.slots},
          {"scales", c.shape.scales},
          {"max_kernel", c.shape.max_kernel},
          {"filters", c.shape.filters},
          {"hidden", c.shape.hidden},
          {"wavelet", c.shape.wavelet},
          {"output_epsilon", c.shape.output_epsilon},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"dropout", c.dropout},
          {"patience", c.patience},
          {"max_epochs", c.max_epochs},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon},
          {"batch_norm_momentum", c.batch_norm_momentum},
          {"validation_fraction", c.validation_fraction},
          {"kl_direction", direction_name(c.direction)},
          {"init_bias_from_targets", c.init_bias_from_targets},
          {"rng_seed", c.rng_seed}};
}

TrainConfig config_from(const json& j) {
  TrainConfig c;
  c.shape.latent_dim = j.at("latent_dim").get<int>();
  c.shape.slots = j.at("slots").get<int>();
  c.shape.scales = j.at("scales").get<std::vector<int>>();
  c.shape.max_kernel = j.at("max_kernel").get<int>();
  c.shape.filters = j.at("filters").get<int>();
  c.shape.hidden = j.at("hidden").get<int>();
  c.shape.wavelet = j.at("wavelet").get<std::string>();
  c.shape.output_epsilon = j.at("output_epsilon").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.patience = j.at("patience").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.batch_norm_momentum = j.at("batch_norm_momentum").get<double>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.direction = direction_from(j.at("kl_direction").get<std::string>());
  c.init_bias_from_targets = j.at("init_bias_from_targets").get<bool>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string checkpoint_json(const Checkpoint& ck) {
  json j = {{"method", ck.method}, {"seed", ck.seed}};
  if (ck.method == "alcnn") {
    if (!ck.config || !ck.params) throw InvalidInput("alcnn checkpoint needs config and parameters");
    j["config"] = config_json(*ck.config);
    ModelParams p = *ck.params;
    json tensors = json::object(), buffers = json::object();
    for (const auto& t : learnable_tensors(p)) tensors[t.name] = std::vector<double>(t.values.begin(), t.values.end());
    for (const auto& t : buffer_tensors(p)) buffers[t.name] = std::vector<double>(t.values.begin(), t.values.end());
    j["tensors"] = std::move(tensors);
    j["running_stats"] = std::move(buffers);
  } else if (ck.method == "lr") {
    if (!ck.ridge) throw InvalidInput("lr checkpoint needs a ridge model");
    j["lambda"] = ck.ridge->ridge.lambda;
    j["wavelet"] = ck.ridge->wavelet;
    j["output_epsilon"] = ck.ridge->epsilon;
    j["weights"] = matrix_json(ck.ridge->ridge.weights);
    j["bias"] = vector_json(ck.ridge->ridge.bias);
  } else if (ck.method == "knn") {
    j["k"] = ck.knn_k;
    j["features"] = matrix_json(ck.knn_features);
    json pats = json::array();
    for (const auto& p : ck.knn_patterns) pats.push_back(std::vector<double>(p.begin(), p.end()));
    j["patterns"] = std::move(pats);
  } else {
    throw InvalidInput("unknown checkpoint method '" + ck.method + "'");
  }
  return dump(j);
}

Checkpoint read_checkpoint(const fs::path& path) {
  const json j = parse_json(path);
  return schema(path, [&] {
    Checkpoint ck;
    ck.method = j.at("method").get<std::string>();
    ck.seed = j.value("seed", std::uint64_t{0});
    if (ck.method == "alcnn") {
      ck.config = config_from(j.at("config"));
      ModelParams p = init_params(ck.config->shape, 0);
      const auto fill = [&path](std::vector<TensorRef> refs, const json& src) {
        for (auto& t : refs) {
          if (!src.contains(t.name)) throw DataError(path.string() + ": missing tensor '" + t.name + "'");
          const auto v = src.at(t.name).get<std::vector<double>>();
          if (v.size() != t.values.size())
            throw DataError(path.string() + ": tensor '" + t.name + "' has " + std::to_string(v.size()) +
                            " values, expected " + std::to_string(t.values.size()));
          std::copy(v.begin(), v.end(), t.values.begin());
        }
      };
      fill(learnable_tensors(p), j.at("tensors"));
      fill(buffer_tensors(p), j.at("running_stats"));
      ck.params = std::move(p);
    } else if (ck.method == "lr") {
      RidgePatternModel m;
      m.ridge.lambda = j.at("lambda").get<double>();
      m.wavelet = j.at("wavelet").get<std::string>();
      m.epsilon = j.at("output_epsilon").get<double>();
      m.ridge.weights = matrix_from(j.at("weights"));
      m.ridge.bias = vector_from(j.at("bias"));
      if (m.ridge.bias.size() != m.ridge.weights.cols()) throw DataError(path.string() + ": ridge bias length mismatch");
      ck.ridge = std::move(m);
    } else if (ck.method == "knn") {
      ck.knn_k = j.at("k").get<int>();
      ck.knn_features = matrix_from(j.at("features"));
      for (const auto& p : j.at("patterns")) ck.knn_patterns.emplace_back(p.get<std::vector<double>>());
      if (static_cast<Eigen::Index>(ck.knn_patterns.size()) != ck.knn_features.rows())
        throw DataError(path.string() + ": knn features and patterns differ in count");
    } else {
      throw DataError(path.string() + ": unknown method '" + ck.method + "'");
    }
    return ck;
  });
}

std::string training_log_csv(const std::vector<EpochLog>& log) {
  std::string s = "epoch,train_klmse,val_klmse,lr,elapsed_ms\n";
  for (const auto& e : log) {
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.1f", e.elapsed_ms);
    s += std::to_string(e.epoch) + ',' + format_double(e.train_klmse) + ',' + format_double(e.val_klmse) + ',' +
         format_double(e.learning_rate) + ',' + ms + '\n';
  }
  return s;
}

std::vector<EpochLog> read_training_log(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ep = t.column("epoch"), tr = t.column("train_klmse"), va = t.column("val_klmse"),
                    lr = t.column("lr"), ms = t.column("elapsed_ms");
  std::vector<EpochLog> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({static_cast<int>(t.integer(r, ep)), t.number(r, tr), t.number(r, va), t.number(r, lr), t.number(r, ms)});
  return out;
}

std::string attention_csv(const std::map<CellIndex, std::vector<double>>& attention, const std::vector<int>& scales) {
  std::string s = "i,j";
  for (int w : scales) s += ",w" + std::to_string(w);
  s += '\n';
  for (const auto& [cell, a] : attention) {
    s += std::to_string(cell.row) + ',' + std::to_string(cell.col);
    for (double v : a) s += ',' + format_double(v);
    s += '\n';
  }
  return s;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string s = "method,klmse,cells,skipped\n";
  for (const auto& r : rows)
    s += r.method + ',' + format_double(r.klmse) + ',' + std::to_string(r.cells) + ',' + std::to_string(r.skipped) + '\n';
  return s;
}

std::vector<ReportRow> read_report(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t m = t.column("method"), k = t.column("klmse"), c = t.column("cells"), sk = t.column("skipped");
  std::vector<ReportRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({t.rows[r][m], t.number(r, k), static_cast<std::size_t>(t.integer(r, c)),
                   static_cast<std::size_t>(t.integer(r, sk))});
  return out;
}

std::string per_cell_kl_csv(const std::map<std::string, EvaluationReport>& reports) {
  std::string s = "i,j";
  std::set<CellIndex> cells;
  for (const auto& [name, r] : reports) {
    s += ',' + name;
    for (const auto& [cell, kl] : r.cell_kl) cells.insert(cell);
  }
  s += '\n';
  for (const auto& cell : cells) {
    s += std::to_string(cell.row) + ',' + std::to_string(cell.col);
    for (const auto& [name, r] : reports) {
      const auto it = r.cell_kl.find(cell);
      s += ',' + (it == r.cell_kl.end() ? std::string() : format_double(it->second));
    }
    s += '\n';
  }
  return s;
}

}  // namespace alcnn::io

#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "alcnn/error.hpp"
#include "alcnn/io.hpp"
#include "alcnn/pipeline.hpp"
#include "alcnn/plot.hpp"

namespace alcnn::cli {

namespace {

namespace fs = std::filesystem;

// Collects every artifact of a run and writes them only once all of them
// have been computed.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(dir_ / name, std::move(content)); }

  void commit() const {
    for (const auto& [path, content] : files_) {
      fs::create_directories(path.parent_path());
      io::write_file_atomic(path, content);
      spdlog::info("wrote {}", path.string());
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

GridMap unit_grid(int rows, int cols) { return GridMap(BoundingBox{{0.0, 0.0}, {1.0, 1.0}}, rows, cols); }

KlDirection parse_direction(const std::string& s) {
  return s == "prediction-target" ? KlDirection::kPredictionToTarget : KlDirection::kTargetToPrediction;
}

const std::vector<std::string> kDirections{"target-prediction", "prediction-target"};

// "NAME=PATH", or a bare path named after its stem.
std::pair<std::string, fs::path> named_path(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {fs::path(arg).stem().string(), fs::path(arg)};
  return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
}

void require_exists(const fs::path& p, const std::string& flag) {
  if (!fs::exists(p)) throw DataError(flag + ": file does not exist: " + p.string());
}

CLI::App* subcommand(CLI::App& app, const std::string& name, const std::string& description) {
  CLI::App* sub = app.add_subcommand(name, description);
  // Expanded into flags before parsing; see expand_config.
  sub->add_option("--config", "JSON object of flag values keyed by flag name; flags on the command line win")
      ->check(CLI::ExistingFile);
  return sub;
}

// ---- synth

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 7;
  SyntheticCitySpec spec;
  bool target_trips = false;
};

void run_synth(const SynthArgs& a) {
  validate(a.spec);
  const auto seeds = experiment_seeds(a.seed);
  const SyntheticPair pair = synthesize_pair(a.spec, a.seed);
  Outputs out(a.out);
  for (const auto& [name, city, trip_seed, with_trips] :
       {std::tuple{"source", &pair.source, seeds.source_trips, true},
        std::tuple{"target", &pair.target, seeds.target_trips, a.target_trips}}) {
    io::CityMeta meta;
    meta.bbox = city->grid.bbox();
    meta.rows = city->grid.rows();
    meta.cols = city->grid.cols();
    meta.slots = a.spec.slots;
    meta.first_day = a.spec.first_day;
    meta.days = a.spec.days;
    const std::string dir = name;
    out.add(dir + "/city.json", io::city_meta_json(meta));
    out.add(dir + "/planted_patterns.json", io::patterns_json(city->planted, static_cast<std::size_t>(a.spec.days)));
    if (with_trips) {
      const auto records = sample_records(city->grid, city->planted, city->intensity, a.spec.days, a.spec.first_day,
                                          trip_seed);
      spdlog::info("{}: {} trip records", name, records.size());
      out.add(dir + "/trips.csv", io::trips_csv(records));
    }
  }
  out.commit();
  io::write_city_data(fs::path(a.out) / "source", pair.source.geo);
  io::write_city_data(fs::path(a.out) / "target", pair.target.geo);
}

void add_synth(CLI::App& app) {
  auto a = std::make_shared<SynthArgs>();
  CLI::App* s = subcommand(app, "synth", "Generate a synthetic source/target city pair with planted patterns");
  s->add_option("--out", a->out, "Output directory (source/ and target/ are created inside)")->required();
  s->add_option("--seed", a->seed, "Base seed of layouts and trip sampling");
  s->add_option("--rows", a->spec.rows, "Grid rows")->check(CLI::PositiveNumber);
  s->add_option("--cols", a->spec.cols, "Grid columns")->check(CLI::PositiveNumber);
  s->add_option("--slots", a->spec.slots, "Time slots per day (even)")->check(CLI::PositiveNumber);
  s->add_option("--days", a->spec.days, "Days of trip records")->check(CLI::PositiveNumber);
  s->add_option("--intensity", a->spec.daily_intensity, "Mean records per cell per day")->check(CLI::NonNegativeNumber);
  s->add_option("--transit", a->spec.transit_count, "Transit stations per city")->check(CLI::NonNegativeNumber);
  s->add_option("--business", a->spec.business_count, "Business centres per city")->check(CLI::NonNegativeNumber);
  s->add_option("--residential", a->spec.residential_count, "Residential zones per city")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--parks", a->spec.park_count, "Parks per city")->check(CLI::NonNegativeNumber);
  s->add_flag("--target-trips", a->target_trips, "Also sample trip records for the target city");
  s->callback([a] { run_synth(*a); });
}

// ---- ingest

struct IngestArgs {
  std::string trips;
  std::string city;
  std::string out;
  int slots = 0;
  bool record_days = false;
};

void run_ingest(const IngestArgs& a) {
  const io::CityMeta meta = io::read_city_meta(a.city);
  const GridMap grid = build_grid(meta.bbox, meta.rows, meta.cols);
  const auto records = io::read_trips(a.trips);
  AggregateOptions opt;
  opt.slots_per_day = a.slots > 0 ? a.slots : meta.slots;
  opt.utc_offset_seconds = meta.utc_offset_seconds;
  if (meta.days > 0 && !a.record_days) opt.day_range = std::pair{meta.first_day, meta.first_day + meta.days - 1};
  const DemandSet demands = aggregate_demands(records, grid, opt);
  spdlog::info("{} records, {} outside the bounding box, {} cells", records.size(), demands.outside_count,
               demands.cells.size());
  Outputs out(a.out);
  out.add("demands.json", io::demands_json(demands));
  out.commit();
}

void add_ingest(CLI::App& app) {
  auto a = std::make_shared<IngestArgs>();
  CLI::App* s = subcommand(app, "ingest", "Aggregate trip records into per-cell daily demand vectors");
  s->add_option("--trips", a->trips, "Trip CSV")->required()->check(CLI::ExistingFile);
  s->add_option("--city", a->city, "city.json with the grid and calendar")->required()->check(CLI::ExistingFile);
  s->add_option("--out", a->out, "Output directory (demands.json)")->required();
  s->add_option("--slots", a->slots, "Slots per day; 0 takes the value from city.json")->check(CLI::NonNegativeNumber);
  s->add_flag("--record-days", a->record_days, "Use the days spanned by the records instead of the city calendar");
  s->callback([a] { run_ingest(*a); });
}

// ---- features

struct FeaturesArgs {
  std::string city;
  std::string data;
  std::string out;
  FeatureConfig cfg;
};

void run_features(const FeaturesArgs& a) {
  const io::CityMeta meta = io::read_city_meta(a.city);
  const GridMap grid = build_grid(meta.bbox, meta.rows, meta.cols);
  const fs::path dir = a.data.empty() ? fs::path(a.city).parent_path() : fs::path(a.data);
  const CityData data = io::read_city_data(dir.empty() ? fs::path(".") : dir, grid, a.cfg);
  const FeatureMatrix f = build_feature_matrix(data, grid, a.cfg);
  spdlog::info("{} cells x {} features", f.rows(), f.cols());
  Outputs out(a.out);
  out.add("features.csv", io::feature_csv(f));
  out.commit();
}

void add_features(CLI::App& app) {
  auto a = std::make_shared<FeaturesArgs>();
  CLI::App* s = subcommand(app, "features", "Extract the per-cell geographic feature matrix");
  s->add_option("--city", a->city, "city.json with the grid")->required()->check(CLI::ExistingFile);
  s->add_option("--data", a->data, "Directory of the geographic CSVs; defaults to the directory of --city")
      ->check(CLI::ExistingDirectory);
  s->add_option("--out", a->out, "Output directory (features.csv)")->required();
  s->add_option("--poi-categories", a->cfg.poi_categories, "POI categories")->check(CLI::PositiveNumber);
  s->add_option("--road-levels", a->cfg.road_levels, "Road levels")->check(CLI::PositiveNumber);
  s->add_option("--sentinel", a->cfg.distance_sentinel_m, "Distance reported when no facility exists (m)")
      ->check(CLI::PositiveNumber);
  s->callback([a] { run_features(*a); });
}

// ---- mine

struct MineArgs {
  std::string demands;
  std::string out;
  MiningOptions mining;
  std::string comparison = "profile";
  std::string wavelet = "db2";
  double threshold_step = 0.01;
  double threshold_max = 0.5;
};

void run_mine(const MineArgs& a) {
  MiningOptions m = a.mining;
  m.comparison = a.comparison == "raw" ? DayComparison::kRawDay : DayComparison::kDayProfile;
  const DemandSet demands = io::read_demands(a.demands);
  const auto mined = mine_patterns(demands, wavelet_by_name(a.wavelet), m);
  std::vector<double> thresholds;
  const int steps = static_cast<int>(std::floor(a.threshold_max / a.threshold_step + 1e-9));
  for (int i = 1; i <= steps; ++i) thresholds.push_back(a.threshold_step * i);
  const auto summary = divergence_histogram(demands, thresholds, m.epsilon);
  std::size_t accepted = 0;
  for (const auto& [cell, p] : mined) accepted += p.accepted;
  spdlog::info("{} of {} cells accepted at beta {}", accepted, mined.size(), m.beta);
  Outputs out(a.out);
  out.add("patterns.json", io::patterns_json(mined));
  out.add("divergence.csv", io::divergence_csv(summary));
  out.commit();
}

void add_mine(CLI::App& app) {
  auto a = std::make_shared<MineArgs>();
  CLI::App* s = subcommand(app, "mine", "Mine each cell's daily demand pattern and the divergence histogram");
  s->add_option("--demands", a->demands, "demands.json from ingest")->required()->check(CLI::ExistingFile);
  s->add_option("--out", a->out, "Output directory (patterns.json, divergence.csv)")->required();
  s->add_option("--beta", a->mining.beta, "Acceptance threshold on the per-day KL divergence")
      ->check(CLI::PositiveNumber);
  s->add_option("--epsilon", a->mining.epsilon, "Smoothing added before normalising")->check(CLI::PositiveNumber);
  s->add_option("--day-pseudocount", a->mining.day_pseudocount, "Pseudo-count added to each slot of a day")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--comparison", a->comparison, "Day vector tested against the candidate")
      ->check(CLI::IsMember({"profile", "raw"}));
  s->add_option("--wavelet", a->wavelet, "Wavelet")->check(CLI::IsMember(builtin_wavelets()));
  s->add_option("--threshold-step", a->threshold_step, "Spacing of the histogram thresholds")
      ->check(CLI::PositiveNumber);
  s->add_option("--threshold-max", a->threshold_max, "Largest histogram threshold")->check(CLI::PositiveNumber);
  s->callback([a] { run_mine(*a); });
}

// ---- train

struct TrainArgs {
  std::string source_features;
  std::string target_features;
  std::string patterns;
  std::string out;
  std::vector<std::string> methods{"alcnn", "lr", "knn"};
  bool all_patterns = false;
  TransferConfig transfer;
  std::string direction = "target-prediction";
  int log_every = 25;
};

void run_train(TrainArgs a) {
  TransferConfig& cfg = a.transfer;
  cfg.train.direction = parse_direction(a.direction);
  cfg.accepted_only = !a.all_patterns;
  const FeatureMatrix src = io::read_features(a.source_features);
  const FeatureMatrix tgt = io::read_features(a.target_features);
  const PatternMap targets = pattern_map(io::read_patterns(a.patterns), cfg.accepted_only);
  if (targets.empty()) throw InsufficientData(a.patterns + ": no usable patterns");
  cfg.train.shape.slots = static_cast<int>(targets.begin()->second.size());
  cfg.train.shape.latent_dim = cfg.latent_dim;

  const std::set<std::string> methods(a.methods.begin(), a.methods.end());
  const bool with_alcnn = methods.count("alcnn") > 0;
  if (with_alcnn) validate(cfg.train);
  spdlog::info("{} training cells, d' = {}", targets.size(), cfg.latent_dim);
  const int every = std::max(1, a.log_every);
  const auto fit = fit_transfer(src, tgt, targets, cfg, with_alcnn, [every](const EpochLog& e) {
    if (e.epoch % every == 0) spdlog::info("epoch {:5d}  train {:.6f}  val {:.6f}", e.epoch, e.train_klmse, e.val_klmse);
  });

  Outputs out(a.out);
  out.add("transform.json", io::transform_json(fit.pca.transform));
  out.add("latent_source.csv", io::latent_csv(fit.pca.latent_source, unit_grid(src.grid_rows(), src.grid_cols())));
  out.add("latent_target.csv", io::latent_csv(fit.pca.latent_target, unit_grid(tgt.grid_rows(), tgt.grid_cols())));
  if (with_alcnn) {
    spdlog::info("best epoch {} of {}, validation KLMSE {:.6f}", fit.training->best_epoch, fit.training->log.size(),
                 fit.training->best_val_klmse);
    io::Checkpoint ck;
    ck.method = "alcnn";
    ck.seed = cfg.train.rng_seed;
    ck.config = cfg.train;
    ck.params = fit.training->params;
    out.add("checkpoint_alcnn.json", io::checkpoint_json(ck));
    out.add("training_log.csv", io::training_log_csv(fit.training->log));
  }
  if (methods.count("lr")) {
    io::Checkpoint ck;
    ck.method = "lr";
    ck.seed = cfg.train.rng_seed;
    ck.ridge = fit.ridge;
    out.add("checkpoint_lr.json", io::checkpoint_json(ck));
  }
  if (methods.count("knn")) {
    io::Checkpoint ck;
    ck.method = "knn";
    ck.seed = cfg.train.rng_seed;
    ck.knn_features = fit.source_rows;
    ck.knn_patterns = fit.source_patterns;
    ck.knn_k = cfg.knn_k;
    out.add("checkpoint_knn.json", io::checkpoint_json(ck));
  }
  out.commit();
}

void add_train(CLI::App& app) {
  auto a = std::make_shared<TrainArgs>();
  TrainConfig& t = a->transfer.train;
  CLI::App* s = subcommand(app, "train", "Joint coPCA, then fit ALCNN and the baselines on the source city");
  s->add_option("--source-features", a->source_features, "Source features.csv")->required()->check(CLI::ExistingFile);
  s->add_option("--target-features", a->target_features, "Target features.csv")->required()->check(CLI::ExistingFile);
  s->add_option("--patterns", a->patterns, "Source patterns.json from mine")->required()->check(CLI::ExistingFile);
  s->add_option("--out", a->out, "Output directory (transform, latent CSVs, checkpoints, training log)")->required();
  s->add_option("--methods", a->methods, "Methods to fit")->delimiter(',')->check(CLI::IsMember({"alcnn", "lr", "knn"}));
  s->add_flag("--all-patterns", a->all_patterns, "Train on rejected cells' candidate patterns too");
  s->add_option("--latent-dim", a->transfer.latent_dim, "coPCA output dimension d'")->check(CLI::PositiveNumber);
  s->add_option("--scales", t.shape.scales, "Local region sizes (odd)")->delimiter(',');
  s->add_option("--max-kernel", t.shape.max_kernel, "Largest convolution kernel")->check(CLI::PositiveNumber);
  s->add_option("--filters", t.shape.filters, "Convolution filters per branch")->check(CLI::PositiveNumber);
  s->add_option("--hidden", t.shape.hidden, "Hidden width of the fully connected layers")->check(CLI::PositiveNumber);
  s->add_option("--wavelet", t.shape.wavelet, "Wavelet of the output head")->check(CLI::IsMember(builtin_wavelets()));
  s->add_option("--output-epsilon", t.shape.output_epsilon, "Smoothing of the output head")->check(CLI::PositiveNumber);
  s->add_option("--learning-rate", t.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
  s->add_option("--batch-size", t.batch_size, "Minibatch size")->check(CLI::PositiveNumber);
  s->add_option("--dropout", t.dropout, "Dropout rate")->check(CLI::Range(0.0, 0.99));
  s->add_option("--patience", t.patience, "Epochs without validation improvement before stopping")
      ->check(CLI::PositiveNumber);
  s->add_option("--max-epochs", t.max_epochs, "Epoch limit")->check(CLI::PositiveNumber);
  s->add_option("--validation-fraction", t.validation_fraction,
                "Share of source cells held out; 0 validates on the training cells")
      ->check(CLI::Range(0.0, 0.9));
  s->add_option("--direction", a->direction, "KL direction of the loss")->check(CLI::IsMember(kDirections));
  s->add_option("--seed", t.rng_seed, "Seed of initialisation, split, shuffling and dropout");
  s->add_option("--lambda", a->transfer.ridge_lambda, "Ridge regularisation")->check(CLI::NonNegativeNumber);
  s->add_option("--knn-k", a->transfer.knn_k, "Neighbours of the KNN baseline")->check(CLI::PositiveNumber);
  s->add_option("--log-every", a->log_every, "Epochs between progress lines");
  s->callback([a] { run_train(*a); });
}

// ---- infer

struct InferArgs {
  std::string checkpoint;
  std::string transform;
  std::string features;
  std::string out;
};

void run_infer(const InferArgs& a) {
  const io::Checkpoint ck = io::read_checkpoint(a.checkpoint);
  const CoPcaTransform t = io::read_transform(a.transform);
  const FeatureMatrix f = io::read_features(a.features);
  const Eigen::MatrixXd latent = transform(t, f);
  const int rows = f.grid_rows(), cols = f.grid_cols();
  Outputs out(a.out);
  PatternMap patterns;
  if (ck.method == "alcnn") {
    auto inferred = infer_city(*ck.params, LatentFeatureTensor::from_cell_rows(latent, rows, cols));
    patterns = std::move(inferred.patterns);
    out.add("attention.csv", io::attention_csv(inferred.attention, ck.params->shape.scales));
  } else if (ck.method == "lr") {
    if (ck.ridge->ridge.weights.rows() != latent.cols())
      throw InvalidInput("checkpoint expects d' = " + std::to_string(ck.ridge->ridge.weights.rows()) +
                         ", transform gives " + std::to_string(latent.cols()));
    patterns = predict_ridge(*ck.ridge, latent, rows, cols);
  } else {
    if (ck.knn_features.cols() != latent.cols())
      throw InvalidInput("checkpoint expects d' = " + std::to_string(ck.knn_features.cols()) + ", transform gives " +
                         std::to_string(latent.cols()));
    patterns = predict_knn(ck.knn_features, ck.knn_patterns, latent, rows, cols, ck.knn_k);
  }
  spdlog::info("{}: {} cells", ck.method, patterns.size());
  out.add("predicted_" + ck.method + ".json", io::patterns_json(patterns, 0));
  out.commit();
}

void add_infer(CLI::App& app) {
  auto a = std::make_shared<InferArgs>();
  CLI::App* s = subcommand(app, "infer", "Predict every target cell's pattern from a checkpoint");
  s->add_option("--checkpoint", a->checkpoint, "checkpoint_<method>.json from train")
      ->required()
      ->check(CLI::ExistingFile);
  s->add_option("--transform", a->transform, "transform.json from train")->required()->check(CLI::ExistingFile);
  s->add_option("--features", a->features, "Target features.csv")->required()->check(CLI::ExistingFile);
  s->add_option("--out", a->out, "Output directory (predicted_<method>.json, attention.csv)")->required();
  s->callback([a] { run_infer(*a); });
}

// ---- eval

struct EvalArgs {
  std::string truth;
  std::vector<std::string> preds;
  std::string out;
  std::string direction = "target-prediction";
};

void run_eval(const EvalArgs& a) {
  const PatternMap truth = pattern_map(io::read_patterns(a.truth), false);
  std::vector<io::ReportRow> rows;
  std::map<std::string, EvaluationReport> reports;
  for (const auto& arg : a.preds) {
    const auto [name, path] = named_path(arg);
    require_exists(path, "--pred");
    if (reports.count(name)) throw InvalidInput("--pred: method name '" + name + "' given twice");
    const auto report = evaluate(pattern_map(io::read_patterns(path), false), truth, parse_direction(a.direction));
    rows.push_back({name, report.klmse, report.compared, report.skipped});
    reports.emplace(name, report);
  }
  for (const auto& r : rows) spdlog::info("{:<12} KLMSE {:.6f}  cells {}  skipped {}", r.method, r.klmse, r.cells, r.skipped);
  Outputs out(a.out);
  out.add("eval_report.csv", io::report_csv(rows));
  out.add("per_cell_kl.csv", io::per_cell_kl_csv(reports));
  out.commit();
}

void add_eval(CLI::App& app) {
  auto a = std::make_shared<EvalArgs>();
  CLI::App* s = subcommand(app, "eval", "KLMSE of predicted pattern maps against a reference map");
  s->add_option("--truth", a->truth, "Reference patterns JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--pred", a->preds, "Predicted patterns as NAME=PATH (repeatable)")->required();
  s->add_option("--out", a->out, "Output directory (eval_report.csv, per_cell_kl.csv)")->required();
  s->add_option("--direction", a->direction, "KL direction")->check(CLI::IsMember(kDirections));
  s->callback([a] { run_eval(*a); });
}

// ---- plot

struct PlotArgs {
  std::string out;
  std::vector<std::string> patterns;
  std::vector<std::string> cells;
  std::string divergence;
  std::string report;
  std::string log;
};

void run_plot(const PlotArgs& a) {
  if (a.patterns.empty() && a.divergence.empty() && a.report.empty() && a.log.empty())
    throw InvalidInput("nothing to plot: give --patterns, --divergence, --report or --log");
  Outputs out(a.out);

  if (!a.patterns.empty()) {
    std::vector<std::pair<std::string, PatternMap>> maps;
    for (const auto& arg : a.patterns) {
      const auto [name, path] = named_path(arg);
      require_exists(path, "--patterns");
      maps.emplace_back(name, pattern_map(io::read_patterns(path), false));
    }
    std::vector<CellIndex> cells;
    for (const auto& key : a.cells) cells.push_back(cell_from_key(key));
    if (cells.empty())
      for (const auto& [cell, p] : maps.front().second) {
        if (cells.size() == 3) break;
        cells.push_back(cell);
      }
    std::vector<plot::Series> series;
    for (const auto& cell : cells)
      for (const auto& [name, map] : maps) {
        const auto it = map.find(cell);
        if (it == map.end()) throw DataError("--patterns: " + name + " has no pattern for cell " + to_key(cell));
        plot::Series s{name + " " + to_key(cell), {}, {}};
        for (std::size_t k = 0; k < it->second.size(); ++k) {
          s.x.push_back(static_cast<double>(k));
          s.y.push_back(it->second[k]);
        }
        series.push_back(std::move(s));
      }
    out.add("pattern_curves.csv", plot::series_csv(series));
    out.add("pattern_curves.svg", plot::line_chart("Daily demand patterns", "time slot", "share of demand", series));
  }

  if (!a.divergence.empty()) {
    const auto t = io::read_csv(a.divergence);
    const auto tc = t.column("threshold"), fc = t.column("cumulative_fraction");
    plot::Series s{"cells", {}, {}};
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      s.x.push_back(t.number(r, tc));
      s.y.push_back(t.number(r, fc));
    }
    out.add("divergence_curve.csv", plot::series_csv({s}));
    out.add("divergence_curve.svg",
            plot::line_chart("Cells whose daily divergence stays under the threshold", "threshold",
                             "fraction of cells", {s}));
  }

  if (!a.report.empty()) {
    const auto rows = io::read_report(a.report);
    std::vector<std::string> labels;
    std::vector<double> values;
    for (const auto& r : rows) {
      labels.push_back(r.method);
      values.push_back(r.klmse);
    }
    plot::Series s{"klmse", {}, values};
    for (std::size_t i = 0; i < values.size(); ++i) s.x.push_back(static_cast<double>(i));
    std::string csv = "method,klmse\n";
    for (std::size_t i = 0; i < rows.size(); ++i) csv += labels[i] + "," + io::format_double(values[i]) + "\n";
    out.add("method_bars.csv", csv);
    out.add("method_bars.svg", plot::bar_chart("KLMSE by method", "KLMSE", labels, values));
  }

  if (!a.log.empty()) {
    const auto log = io::read_training_log(a.log);
    plot::Series tr{"train", {}, {}}, va{"validation", {}, {}};
    for (const auto& e : log) {
      tr.x.push_back(e.epoch);
      tr.y.push_back(e.train_klmse);
      va.x.push_back(e.epoch);
      va.y.push_back(e.val_klmse);
    }
    out.add("training_curve.csv", plot::series_csv({tr, va}));
    out.add("training_curve.svg", plot::line_chart("Training", "epoch", "KLMSE", {tr, va}));
  }
  out.commit();
}

void add_plot(CLI::App& app) {
  auto a = std::make_shared<PlotArgs>();
  CLI::App* s = subcommand(app, "plot", "Write CSV and SVG figures from pipeline outputs");
  s->add_option("--out", a->out, "Output directory")->required();
  s->add_option("--patterns", a->patterns, "Pattern maps as NAME=PATH (repeatable)");
  s->add_option("--cells", a->cells, "Cells to draw as \"i,j\"; defaults to the first three of the first map");
  s->add_option("--divergence", a->divergence, "divergence.csv from mine")->check(CLI::ExistingFile);
  s->add_option("--report", a->report, "eval_report.csv, drawn as one bar per method")->check(CLI::ExistingFile);
  s->add_option("--log", a->log, "training_log.csv from train")->check(CLI::ExistingFile);
  s->callback([a] { run_plot(*a); });
}

}  // namespace

void add_commands(CLI::App& app) {
  add_synth(app);
  add_ingest(app);
  add_features(app);
  add_mine(app);
  add_train(app);
  add_infer(app);
  add_eval(app);
  add_plot(app);
}

}  // namespace alcnn::cli

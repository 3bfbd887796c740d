#include "drift/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "drift/baselines.hpp"
#include "drift/detectors.hpp"
#include "drift/oracle.hpp"
#include "drift/rng.hpp"

namespace drift {

namespace fs = std::filesystem;

std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::HhtCu: return "hht_cu";
    case DetectorKind::HhtAg: return "hht_ag";
    case DetectorKind::AttributeKs: return "aks";
    case DetectorKind::Ddm: return "ddm";
    case DetectorKind::Eddm: return "eddm";
    case DetectorKind::Hddm: return "hddm";
  }
  throw std::invalid_argument("to_string: unknown detector kind");
}

DetectorKind detector_kind_from_string(const std::string& name) {
  if (name == "hht_cu") return DetectorKind::HhtCu;
  if (name == "hht_ag") return DetectorKind::HhtAg;
  if (name == "aks") return DetectorKind::AttributeKs;
  if (name == "ddm") return DetectorKind::Ddm;
  if (name == "eddm") return DetectorKind::Eddm;
  if (name == "hddm") return DetectorKind::Hddm;
  throw std::invalid_argument("unknown detector kind: " + name);
}

namespace {

double jreal(const nlohmann::json& p, const char* key, double fallback) {
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

std::size_t jsize(const nlohmann::json& p, const char* key, std::size_t fallback) {
  return p.contains(key) ? p.at(key).get<std::size_t>() : fallback;
}

void check_param_keys(const nlohmann::json& params, std::initializer_list<const char*> allowed,
                      const std::string& kind) {
  for (const auto& [key, value] : params.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&key](const char* k) { return key == k; }) == allowed.end()) {
      throw std::invalid_argument("detector '" + kind + "': unknown parameter '" + key + "'");
    }
  }
}

HhtCuConfig cu_config(const nlohmann::json& p, const HarnessConfig& harness) {
  HhtCuConfig cfg;
  cfg.window = harness.window;
  cfg.retraining = harness.training;
  cfg.theta1 = jreal(p, "theta1", cfg.theta1);
  cfg.theta2 = jreal(p, "theta2", cfg.theta2);
  cfg.permutations = jsize(p, "permutations", cfg.permutations);
  cfg.min_reference_count = jsize(p, "min_reference_count", cfg.min_reference_count);
  cfg.validate();
  return cfg;
}

HhtAgConfig ag_config(const nlohmann::json& p, const HarnessConfig& harness, bool layer2) {
  HhtAgConfig cfg;
  cfg.window = harness.window;
  cfg.layer2_enabled = layer2;
  cfg.theta1 = jreal(p, "theta1", cfg.theta1);
  if (layer2) {
    cfg.theta2 = jreal(p, "theta2", cfg.theta2);
    cfg.permutations = jsize(p, "permutations", cfg.permutations);
  }
  cfg.validate();
  return cfg;
}

DdmConfig ddm_config(const nlohmann::json& p) {
  DdmConfig cfg;
  cfg.warning_scale = jreal(p, "warning_scale", cfg.warning_scale);
  cfg.drift_scale = jreal(p, "drift_scale", cfg.drift_scale);
  cfg.min_samples = jsize(p, "min_samples", cfg.min_samples);
  cfg.validate();
  return cfg;
}

EddmConfig eddm_config(const nlohmann::json& p) {
  EddmConfig cfg;
  cfg.warning_ratio = jreal(p, "warning_ratio", cfg.warning_ratio);
  cfg.drift_ratio = jreal(p, "drift_ratio", cfg.drift_ratio);
  cfg.min_errors = jsize(p, "min_errors", cfg.min_errors);
  cfg.validate();
  return cfg;
}

HddmConfig hddm_config(const nlohmann::json& p) {
  HddmConfig cfg;
  cfg.alpha_warning = jreal(p, "alpha_warning", cfg.alpha_warning);
  cfg.alpha_drift = jreal(p, "alpha_drift", cfg.alpha_drift);
  cfg.validate();
  return cfg;
}

// Parses and validates a detector's parameters; throws on unknown keys or
// out-of-range values so broken configs fail at load time, not mid-matrix.
void validate_detector(const DetectorSpec& spec, const HarnessConfig& harness) {
  const std::string kind = to_string(spec.kind);
  switch (spec.kind) {
    case DetectorKind::HhtCu:
      check_param_keys(spec.params, {"theta1", "theta2", "permutations", "min_reference_count"}, kind);
      (void)cu_config(spec.params, harness);
      break;
    case DetectorKind::HhtAg:
      check_param_keys(spec.params, {"theta1", "theta2", "permutations"}, kind);
      (void)ag_config(spec.params, harness, true);
      break;
    case DetectorKind::AttributeKs:
      check_param_keys(spec.params, {"theta1"}, kind);
      (void)ag_config(spec.params, harness, false);
      break;
    case DetectorKind::Ddm:
      check_param_keys(spec.params, {"warning_scale", "drift_scale", "min_samples"}, kind);
      (void)ddm_config(spec.params);
      break;
    case DetectorKind::Eddm:
      check_param_keys(spec.params, {"warning_ratio", "drift_ratio", "min_errors"}, kind);
      (void)eddm_config(spec.params);
      break;
    case DetectorKind::Hddm:
      check_param_keys(spec.params, {"alpha_warning", "alpha_drift"}, kind);
      (void)hddm_config(spec.params);
      break;
  }
}

void check_name(const std::string& name, const char* what) {
  if (name.empty()) throw std::invalid_argument(std::string(what) + ": name must not be empty");
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) {
      throw std::invalid_argument(std::string(what) + " '" + name +
                                  "': names may only use letters, digits, '-', '_', '.'");
    }
  }
}

}  // namespace

nlohmann::json DetectorSpec::to_json() const {
  nlohmann::json j = params;
  j["kind"] = to_string(kind);
  j["name"] = name;
  return j;
}

DetectorSpec DetectorSpec::from_json(const nlohmann::json& j) {
  DetectorSpec spec;
  spec.kind = detector_kind_from_string(j.at("kind").get<std::string>());
  spec.name = j.contains("name") ? j.at("name").get<std::string>() : to_string(spec.kind);
  spec.params = nlohmann::json::object();
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "name") spec.params[key] = value;
  }
  return spec;
}

nlohmann::json StreamEntry::to_json() const {
  nlohmann::json j;
  if (spec) {
    j = spec->to_json();
  } else {
    j["csv"] = csv_path;
    if (label_column) j["label_column"] = *label_column;
    j["true_drifts"] = true_drifts;
    if (classes > 0) j["classes"] = classes;
  }
  j["name"] = name;
  return j;
}

StreamEntry StreamEntry::from_json(const nlohmann::json& j) {
  StreamEntry entry;
  if (j.contains("csv")) {
    entry.csv_path = j.at("csv").get<std::string>();
    if (j.contains("label_column")) entry.label_column = j.at("label_column").get<std::size_t>();
    if (j.contains("true_drifts")) {
      entry.true_drifts = j.at("true_drifts").get<std::vector<std::size_t>>();
      if (!std::is_sorted(entry.true_drifts.begin(), entry.true_drifts.end())) {
        throw std::invalid_argument("stream entry: true_drifts must be sorted ascending");
      }
    }
    if (j.contains("classes")) entry.classes = j.at("classes").get<std::size_t>();
    entry.name = j.contains("name") ? j.at("name").get<std::string>()
                                    : fs::path(entry.csv_path).stem().string();
  } else {
    nlohmann::json spec_json = j;
    spec_json.erase("name");
    entry.spec = StreamSpec::from_json(spec_json);
    entry.name = j.contains("name") ? j.at("name").get<std::string>() : to_string(entry.spec->kind);
  }
  check_name(entry.name, "stream entry");
  return entry;
}

void ExperimentConfig::validate() const {
  if (window < 2) throw std::invalid_argument("config: window must be at least 2");
  if (!(reference_range > 0.0)) throw std::invalid_argument("config: reference_range must be positive");
  if (seeds.empty()) throw std::invalid_argument("config: need seeds or a positive seed_count");
  if (streams.empty()) throw std::invalid_argument("config: need at least one stream");
  if (detectors.empty()) throw std::invalid_argument("config: need at least one detector");
  if (training.epochs == 0) throw std::invalid_argument("config: training epochs must be positive");
  if (grid) (void)grid->values();

  const HarnessConfig h = harness();
  std::vector<std::string> names;
  for (const auto& d : detectors) {
    check_name(d.name, "detector");
    validate_detector(d, h);
    names.push_back(d.name);
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw std::invalid_argument("config: detector names must be unique");
  }
  names.clear();
  for (const auto& s : streams) names.push_back(s.name);
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw std::invalid_argument("config: stream names must be unique");
  }
}

HarnessConfig ExperimentConfig::harness() const {
  HarnessConfig h;
  h.window = window;
  h.training = training;
  h.grid = grid ? *grid : RangeGrid::for_window(window);
  h.reference_range = reference_range;
  return h;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("workers")) cfg.workers = std::max<std::size_t>(1, j.at("workers").get<std::size_t>());
  if (j.contains("window")) cfg.window = j.at("window").get<std::size_t>();
  if (j.contains("reference_range")) cfg.reference_range = j.at("reference_range").get<double>();
  if (j.contains("grid")) cfg.grid = RangeGrid::from_json(j.at("grid"));
  if (j.contains("write_events")) cfg.write_events = j.at("write_events").get<bool>();
  if (j.contains("training")) {
    const auto& t = j.at("training");
    cfg.training.epochs = jsize(t, "epochs", cfg.training.epochs);
    cfg.training.learning_rate = jreal(t, "learning_rate", cfg.training.learning_rate);
    cfg.training.l2 = jreal(t, "l2", cfg.training.l2);
  }
  if (j.contains("seeds") && j.contains("seed_count")) {
    throw std::invalid_argument("config: give either seeds or seed_count, not both");
  }
  if (j.contains("seeds")) {
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } else if (j.contains("seed_count")) {
    const auto count = j.at("seed_count").get<std::size_t>();
    for (std::size_t i = 1; i <= count; ++i) cfg.seeds.push_back(i);
  }
  for (const auto& s : j.at("streams")) cfg.streams.push_back(StreamEntry::from_json(s));
  for (const auto& d : j.at("detectors")) cfg.detectors.push_back(DetectorSpec::from_json(d));
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

GeneratedStream materialize(const StreamEntry& entry, std::uint64_t seed) {
  if (entry.spec) {
    StreamSpec spec = *entry.spec;
    spec.seed = derive_seed(spec.seed, seed);
    return generate(spec);
  }
  GeneratedStream stream;
  stream.items = load_csv(entry.csv_path, entry.label_column);
  if (stream.items.empty()) throw std::runtime_error("stream '" + entry.name + "': CSV is empty");
  stream.true_drifts = entry.true_drifts;
  stream.spec.kind = StreamKind::Stationary;
  stream.spec.length = stream.items.size();
  stream.spec.dim = stream.items.front().x.size();
  stream.spec.segments = 1;
  int max_label = 0;
  for (const Sample& s : stream.items) max_label = std::max(max_label, s.y);
  stream.spec.classes = entry.classes > 0 ? entry.classes
                                          : static_cast<std::size_t>(max_label + 1);
  if (static_cast<std::size_t>(max_label) >= stream.spec.classes) {
    throw std::runtime_error("stream '" + entry.name + "': labels exceed the declared class count");
  }
  return stream;
}

namespace {

// Per-kind streaming policy: produce the status for one item and keep the
// prediction model current. The harness records predictions and events; the
// driver owns label requests beyond that.
class DetectorDriver {
 public:
  virtual ~DetectorDriver() = default;
  virtual DetectorStatus step(std::size_t t, std::span<const double> x, int prediction,
                              MeteredStream& oracle) = 0;
  virtual const PosteriorClassifier& model() const = 0;
  virtual double statistic() const = 0;
  virtual std::size_t deferred() const { return 0; }
};

class CuDriver final : public DetectorDriver {
 public:
  CuDriver(PosteriorClassifier initial, HhtCuConfig config, std::uint64_t seed)
      : detector_(std::move(initial), config, seed) {}

  DetectorStatus step(std::size_t t, std::span<const double> x, int, MeteredStream& oracle) override {
    return detector_.observe(t, x, oracle);
  }
  const PosteriorClassifier& model() const override { return detector_.model(); }
  double statistic() const override { return detector_.layer1_statistic(); }
  std::size_t deferred() const override { return detector_.deferred_drifts().size(); }
  const HhtCuDetector& detector() const { return detector_; }

 private:
  HhtCuDetector detector_;
};

// Shared by the attribute detector with and without its confirmation stage:
// on a confirmed drift the model retrains on the most recent N labels.
template <class Detector>
class WindowedDriver final : public DetectorDriver {
 public:
  WindowedDriver(Detector detector, PosteriorClassifier initial, const HarnessConfig& harness,
                 std::size_t classes, std::uint64_t seed)
      : detector_(std::move(detector)),
        model_(std::move(initial)),
        harness_(harness),
        classes_(classes),
        seed_(seed) {}

  DetectorStatus step(std::size_t t, std::span<const double> x, int, MeteredStream& oracle) override {
    const DetectorStatus status = detector_.observe(t, x, oracle);
    if (status == DetectorStatus::ConfirmedDrift) {
      const LabeledWindow fresh = oracle.request_labels(t + 1 - harness_.window, t + 1);
      model_ = PosteriorClassifier::train(fresh, harness_.training, derive_seed(seed_, t), classes_);
    }
    return status;
  }
  const PosteriorClassifier& model() const override { return model_; }
  double statistic() const override { return detector_.layer1_statistic(); }
  std::size_t deferred() const override { return detector_.deferred_drifts().size(); }

 private:
  Detector detector_;
  PosteriorClassifier model_;
  HarnessConfig harness_;
  std::size_t classes_;
  std::uint64_t seed_;
};

// Supervised monitors: one label per item, warning-zone buffering, retrain
// on the buffered zone. A zone with fewer than two items or a single class
// cannot fit a model; the old model is kept until a later, trainable signal
// (retraining on such a zone would install a degenerate constant predictor
// that flattens the error signal and blinds the monitor permanently).
template <class Monitor>
class SupervisedDriver final : public DetectorDriver {
 public:
  SupervisedDriver(Monitor monitor, PosteriorClassifier initial, const HarnessConfig& harness,
                   std::size_t classes, std::uint64_t seed)
      : monitor_(std::move(monitor)),
        model_(std::move(initial)),
        harness_(harness),
        classes_(classes),
        seed_(seed) {}

  DetectorStatus step(std::size_t t, std::span<const double>, int prediction,
                      MeteredStream& oracle) override {
    const LabeledWindow revealed = oracle.request_labels(t, t + 1);
    const Sample& item = revealed.items().front();
    labeled_.push_back(item);
    const DetectorStatus status = monitor_.observe(prediction == item.y);

    if (status == DetectorStatus::PotentialDrift) {
      if (!warn_start_) warn_start_ = labeled_.size() - 1;
    } else if (status == DetectorStatus::Stable) {
      warn_start_.reset();
    } else {
      retrain(t);
      warn_start_.reset();
    }
    return status;
  }

  const PosteriorClassifier& model() const override { return model_; }

  double statistic() const override {
    if constexpr (std::is_same_v<Monitor, DdmMonitor>) {
      return monitor_.error_rate() + monitor_.error_std();
    } else if constexpr (std::is_same_v<Monitor, EddmMonitor>) {
      return monitor_.last_ratio();
    } else {
      return monitor_.error_rate() - monitor_.reference_rate();
    }
  }

 private:
  void retrain(std::size_t t) {
    if (!warn_start_) return;
    const std::span<const Sample> all(labeled_);
    const std::span<const Sample> chunk = all.subspan(*warn_start_);
    if (!trainable(chunk)) return;
    model_ = PosteriorClassifier::train(chunk, harness_.training, derive_seed(seed_, t), classes_);
  }

  static bool trainable(std::span<const Sample> chunk) {
    if (chunk.size() < 2) return false;
    for (const Sample& s : chunk) {
      if (s.y != chunk.front().y) return true;
    }
    return false;
  }

  Monitor monitor_;
  PosteriorClassifier model_;
  HarnessConfig harness_;
  std::size_t classes_;
  std::uint64_t seed_;
  std::vector<Sample> labeled_;
  std::optional<std::size_t> warn_start_;
};

std::unique_ptr<DetectorDriver> make_driver(const DetectorSpec& spec, const HarnessConfig& harness,
                                            PosteriorClassifier initial, std::size_t dim,
                                            std::size_t classes, std::uint64_t seed) {
  switch (spec.kind) {
    case DetectorKind::HhtCu:
      return std::make_unique<CuDriver>(std::move(initial), cu_config(spec.params, harness), seed);
    case DetectorKind::HhtAg:
      return std::make_unique<WindowedDriver<HhtAgDetector>>(
          HhtAgDetector(dim, ag_config(spec.params, harness, true), seed), std::move(initial),
          harness, classes, seed);
    case DetectorKind::AttributeKs:
      return std::make_unique<WindowedDriver<AttributeKsDetector>>(
          AttributeKsDetector(dim, ag_config(spec.params, harness, false), seed), std::move(initial),
          harness, classes, seed);
    case DetectorKind::Ddm:
      return std::make_unique<SupervisedDriver<DdmMonitor>>(DdmMonitor(ddm_config(spec.params)),
                                                            std::move(initial), harness, classes, seed);
    case DetectorKind::Eddm:
      return std::make_unique<SupervisedDriver<EddmMonitor>>(EddmMonitor(eddm_config(spec.params)),
                                                             std::move(initial), harness, classes, seed);
    case DetectorKind::Hddm:
      return std::make_unique<SupervisedDriver<HddmMonitor>>(HddmMonitor(hddm_config(spec.params)),
                                                             std::move(initial), harness, classes, seed);
  }
  throw std::invalid_argument("make_driver: unknown detector kind");
}

}  // namespace

RunResult run_detector(const GeneratedStream& stream, const DetectorSpec& spec,
                       const HarnessConfig& harness, std::uint64_t seed) {
  const std::size_t n = harness.window;
  if (stream.items.size() <= 2 * n) {
    throw std::runtime_error("run_detector: stream shorter than twice the window");
  }
  if (stream.spec.classes < 2) throw std::runtime_error("run_detector: need at least two classes");

  MeteredStream oracle(stream.items, n);
  const LabeledWindow initial_window = oracle.request_labels(0, n);
  PosteriorClassifier initial =
      PosteriorClassifier::train(initial_window, harness.training, seed, stream.spec.classes);

  auto driver = make_driver(spec, harness, std::move(initial), stream.spec.dim,
                            stream.spec.classes, seed);

  RunResult result;
  result.seed = seed;
  result.detector = spec.name;

  std::vector<int> predictions;
  std::vector<int> truth;
  predictions.reserve(stream.items.size() - n);
  truth.reserve(stream.items.size() - n);
  result.events.reserve(stream.items.size() - n);

  while (auto item = oracle.next()) {
    const std::size_t t = item->first;
    if (t < n) continue;  // initial training span, not streamed through the detector

    const int prediction = driver->model().predict(item->second);
    predictions.push_back(prediction);
    truth.push_back(stream.items[t].y);

    const DetectorStatus status = driver->step(t, item->second, prediction, oracle);
    if (status == DetectorStatus::ConfirmedDrift) result.confirmed.push_back(t);
    if (status != DetectorStatus::Stable) result.potential.push_back(t);

    result.events.push_back({t, status, driver->statistic(), oracle.labels_used()});
  }

  result.deferred = driver->deferred();
  result.report = score_run(stream.true_drifts, result.confirmed, harness.grid,
                            harness.reference_range, predictions, truth, oracle.label_fraction());
  return result;
}

nlohmann::json RunResult::report_json() const {
  nlohmann::json j = report.to_json();
  j["stream"] = stream;
  j["detector"] = detector;
  j["seed"] = seed;
  j["confirmed"] = confirmed;
  j["potential"] = potential;
  j["deferred"] = deferred;
  return j;
}

namespace {

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string events_jsonl(const std::vector<EventRecord>& events) {
  std::string out;
  for (const EventRecord& e : events) {
    nlohmann::json j{{"t", e.t},
                     {"status", to_string(e.status)},
                     {"layer1", e.layer1_statistic},
                     {"labels_used", e.labels_used}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_run(const fs::path& root, const RunResult& run, bool write_events) {
  const fs::path dir = root / run.stream / run.detector / ("seed-" + std::to_string(run.seed));
  fs::create_directories(dir);
  write_file(dir / "report.json", run.report_json().dump(2) + "\n");
  write_file(dir / "curve.csv", run.report.curve_csv());
  if (write_events) write_file(dir / "events.jsonl", events_jsonl(run.events));
}

}  // namespace

std::vector<RunResult> run_matrix(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  const HarnessConfig harness = config.harness();

  struct Task {
    std::size_t stream_index;
    std::size_t seed_index;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < config.streams.size(); ++s) {
    for (std::size_t k = 0; k < config.seeds.size(); ++k) tasks.push_back({s, k});
  }

  std::vector<RunResult> results(tasks.size() * config.detectors.size());
  std::atomic<std::size_t> next_task{0};
  std::mutex failure_mutex;
  std::vector<std::string> failures;

  const auto worker = [&] {
    for (;;) {
      const std::size_t index = next_task.fetch_add(1);
      if (index >= tasks.size()) return;
      const Task task = tasks[index];
      const StreamEntry& entry = config.streams[task.stream_index];
      const std::uint64_t run_seed = config.seeds[task.seed_index];
      try {
        const GeneratedStream stream = materialize(entry, run_seed);
        for (std::size_t d = 0; d < config.detectors.size(); ++d) {
          RunResult run = run_detector(stream, config.detectors[d], harness,
                                       derive_seed(run_seed, d));
          run.stream = entry.name;
          run.seed = run_seed;
          if (!out_dir.empty()) write_run(out_dir, run, config.write_events);
          results[index * config.detectors.size() + d] = std::move(run);
        }
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        failures.push_back("stream '" + entry.name + "' seed " + std::to_string(run_seed) + ": " +
                           e.what());
      }
    }
  };

  const std::size_t thread_count = std::min<std::size_t>(std::max<std::size_t>(config.workers, 1),
                                                         tasks.size());
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (!failures.empty()) {
    std::string message = "run_matrix: " + std::to_string(failures.size()) + " task(s) failed; first: " +
                          failures.front();
    throw std::runtime_error(message);
  }
  return results;
}

nlohmann::json evaluate_directory(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);

  struct Accumulator {
    std::size_t runs = 0;
    double nauc_precision = 0.0;
    double nauc_recall = 0.0;
    double accuracy = 0.0;
    double label_fraction = 0.0;
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    double detections = 0.0;
  };
  std::map<std::pair<std::string, std::string>, Accumulator> groups;

  std::vector<fs::path> report_paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "report.json") {
      report_paths.push_back(entry.path());
    }
  }
  std::sort(report_paths.begin(), report_paths.end());

  for (const fs::path& path : report_paths) {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    if (!in) throw std::runtime_error("unreadable report: " + path.string());
    Accumulator& acc = groups[{j.at("stream").get<std::string>(), j.at("detector").get<std::string>()}];
    ++acc.runs;
    acc.nauc_precision += j.at("nauc_precision").get<double>();
    acc.nauc_recall += j.at("nauc_recall").get<double>();
    acc.accuracy += j.at("accuracy").get<double>();
    acc.label_fraction += j.at("label_fraction").get<double>();
    acc.tp += j.at("tp").get<double>();
    acc.fp += j.at("fp").get<double>();
    acc.fn += j.at("fn").get<double>();
    acc.detections += static_cast<double>(j.at("confirmed").size());
  }
  if (groups.empty()) throw std::runtime_error("no report.json files under: " + dir);

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [key, acc] : groups) {
    const double n = static_cast<double>(acc.runs);
    rows.push_back(nlohmann::json{{"stream", key.first},
                                  {"detector", key.second},
                                  {"runs", acc.runs},
                                  {"mean_nauc_precision", acc.nauc_precision / n},
                                  {"mean_nauc_recall", acc.nauc_recall / n},
                                  {"mean_accuracy", acc.accuracy / n},
                                  {"mean_label_fraction", acc.label_fraction / n},
                                  {"mean_tp", acc.tp / n},
                                  {"mean_fp", acc.fp / n},
                                  {"mean_fn", acc.fn / n},
                                  {"mean_detections", acc.detections / n}});
  }
  return nlohmann::json{{"directory", dir}, {"groups", rows}};
}

int cmd_generate(const ExperimentConfig& config) {
  const fs::path root = fs::path(config.out) / "streams";
  fs::create_directories(root);
  std::size_t written = 0;
  for (const StreamEntry& entry : config.streams) {
    if (!entry.spec) {
      std::cerr << "skipping '" << entry.name << "': external CSV streams are not generated\n";
      continue;
    }
    for (std::uint64_t seed : config.seeds) {
      const GeneratedStream stream = materialize(entry, seed);
      const std::string base = entry.name + "-seed-" + std::to_string(seed);
      save_csv(stream, (root / (base + ".csv")).string());
      write_file(root / (base + ".manifest.json"), manifest_json(stream).dump(2) + "\n");
      ++written;
    }
  }
  std::cout << "generated " << written << " stream(s) under " << root.string() << "\n";
  return 0;
}

int cmd_run(const ExperimentConfig& config) {
  const std::vector<RunResult> results = run_matrix(config, config.out);
  std::cout << "completed " << results.size() << " run(s) under " << config.out << "\n";
  return 0;
}

int cmd_evaluate(const std::string& dir) {
  const nlohmann::json aggregate = evaluate_directory(dir);
  write_file(fs::path(dir) / "aggregate.json", aggregate.dump(2) + "\n");

  std::cout << "stream,detector,runs,mean_nauc_precision,mean_nauc_recall,mean_accuracy,"
               "mean_label_fraction,mean_detections\n";
  for (const auto& row : aggregate.at("groups")) {
    std::cout << row.at("stream").get<std::string>() << ',' << row.at("detector").get<std::string>()
              << ',' << row.at("runs").get<std::size_t>() << ','
              << row.at("mean_nauc_precision").get<double>() << ','
              << row.at("mean_nauc_recall").get<double>() << ','
              << row.at("mean_accuracy").get<double>() << ','
              << row.at("mean_label_fraction").get<double>() << ','
              << row.at("mean_detections").get<double>() << "\n";
  }
  return 0;
}

}  // namespace drift

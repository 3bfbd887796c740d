#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drift/classifier.hpp"
#include "drift/eval.hpp"
#include "drift/streamgen.hpp"
#include "drift/types.hpp"

namespace drift {

enum class DetectorKind { HhtCu, HhtAg, AttributeKs, Ddm, Eddm, Hddm };

std::string to_string(DetectorKind kind);
DetectorKind detector_kind_from_string(const std::string& name);

// One detector entry of an experiment: which algorithm, the label used in
// output paths and aggregates, and raw parameter overrides (validated when
// the config is loaded, applied when each run builds its detector).
struct DetectorSpec {
  DetectorKind kind = DetectorKind::HhtCu;
  std::string name;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
  static DetectorSpec from_json(const nlohmann::json& j);
};

// One stream entry: either a synthetic generator spec (regenerated per seed
// with a derived seed) or an external CSV with externally supplied ground
// truth.
struct StreamEntry {
  std::string name;
  std::optional<StreamSpec> spec;
  std::string csv_path;
  std::optional<std::size_t> label_column;
  std::vector<std::size_t> true_drifts;  // for CSV streams
  std::size_t classes = 0;               // 0 = deduce from the data (CSV only)

  nlohmann::json to_json() const;
  static StreamEntry from_json(const nlohmann::json& j);
};

// Shared per-run policy: the window size N (initial training budget, request
// window, retrain window), the training budget, the scoring grid, and the
// warning-buffer retraining rule for the supervised monitors.
struct HarnessConfig {
  std::size_t window = 100;
  TrainingConfig training{};
  RangeGrid grid = RangeGrid::for_window(100);
  double reference_range = 500.0;
};

struct ExperimentConfig {
  std::string out = "runs";
  std::size_t workers = 1;
  std::size_t window = 100;
  double reference_range = 500.0;
  std::optional<RangeGrid> grid;  // defaults to RangeGrid::for_window(window)
  TrainingConfig training{};
  std::vector<std::uint64_t> seeds;  // from "seeds" or "seed_count" (1..n)
  std::vector<StreamEntry> streams;
  std::vector<DetectorSpec> detectors;
  bool write_events = true;

  void validate() const;
  HarnessConfig harness() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

struct EventRecord {
  std::size_t t = 0;
  DetectorStatus status = DetectorStatus::Stable;
  double layer1_statistic = 0.0;
  std::size_t labels_used = 0;
};

struct RunResult {
  std::string stream;
  std::string detector;
  std::uint64_t seed = 0;
  std::vector<std::size_t> confirmed;
  std::vector<std::size_t> potential;
  std::size_t deferred = 0;
  DetectionReport report;
  std::vector<EventRecord> events;

  // Flat record: run metadata + the report fields (events go to their own
  // newline-delimited file).
  nlohmann::json report_json() const;
};

// Builds the concrete stream for one (entry, seed) pair. Synthetic entries
// re-derive their generator seed from (spec.seed, run seed); CSV entries load
// the file once per call and carry the externally supplied ground truth.
GeneratedStream materialize(const StreamEntry& entry, std::uint64_t seed);

// Runs one detector over one stream: trains the initial model on the first N
// labels, streams the remainder through the detector with the per-kind
// label/retrain policy, and scores the confirmed detections. Deterministic
// for fixed inputs.
RunResult run_detector(const GeneratedStream& stream, const DetectorSpec& spec,
                       const HarnessConfig& harness, std::uint64_t seed);

// Full streams x detectors x seeds matrix, parallel over (stream, seed)
// tasks so every detector in a task scores the identical materialized
// stream. When out_dir is nonempty, writes per-run report.json + curve.csv
// (+ events.jsonl when write_events) under
// out_dir/<stream>/<detector>/seed-<seed>/.
std::vector<RunResult> run_matrix(const ExperimentConfig& config, const std::string& out_dir);

// Mean NAUCs, label fraction, accuracy, and detection counts per
// (stream, detector), aggregated from every report.json under dir.
nlohmann::json evaluate_directory(const std::string& dir);

int cmd_generate(const ExperimentConfig& config);
int cmd_run(const ExperimentConfig& config);
int cmd_evaluate(const std::string& dir);

}  // namespace drift

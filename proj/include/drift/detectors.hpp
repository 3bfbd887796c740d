#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "drift/classifier.hpp"
#include "drift/oracle.hpp"
#include "drift/stats.hpp"
#include "drift/types.hpp"

namespace drift {

// Confirmation test shared by the uncertainty detector: given a pool of 2N
// labeled samples split in the middle, train-on-one-half / evaluate-on-the-
// other losses are compared against their label-shuffled permutation
// distribution in both directions (forward: fit first half, score second;
// reverse: fit second, score first). Confirms when either direction's
// p-value falls below `significance`. A pool carrying a single label is
// untestable and never confirms.
struct Layer2Config {
  double significance = 0.01;
  std::size_t permutations = 500;
  // Reduced-budget fits: each invocation trains permutations+1 throwaway
  // models per direction, so the full training schedule would dominate the
  // run time without changing the test's calibration (observed and shuffled
  // splits share the loss functional).
  TrainingConfig training{.epochs = 60, .learning_rate = 0.3, .l2 = 1e-4};

  // Throws std::invalid_argument when significance is outside (0,1),
  // permutations is 0, or the add-one-smoothed p-value floor
  // 1/(permutations+1) already exceeds significance (the test could never
  // confirm anything).
  void validate() const;
};

bool hht_cu_layer2(const LabeledWindow& pool, const Layer2Config& config, std::uint64_t seed);

struct HhtCuConfig {
  double theta1 = 0.01;   // Layer-I significance
  double theta2 = 0.01;   // Layer-II significance
  std::size_t window = 100;  // N: half of the confirmation pool, retrain size
  std::size_t min_reference_count = 30;  // cutoff snapshot size required before testing
  std::size_t permutations = 500;
  TrainingConfig retraining{};  // used when a confirmed drift retrains the model

  void validate() const;
  Layer2Config layer2() const;
};

// Streaming detector that watches the classifier's prediction uncertainty.
// Layer-I keeps the running mean of per-item uncertainties plus a frozen
// snapshot of the historically lowest upper-confidence prefix (the cutoff);
// when the era-wide running mean exceeds the snapshot mean by more than the
// split bound at theta1 (which bounds exactly that gap: the running mean
// over n+m items versus its own first-n prefix), the detector requests the
// 2N labels around the current index and runs the permutation confirmation
// at theta2. A confirmed drift retrains the model on the window starting at
// the current index and resets everything; a denial restarts the Layer-I
// statistics but keeps the model. When the 2N window is unavailable (too
// early, or the stream ends inside it) the candidate is logged as deferred
// and Layer-I restarts.
class HhtCuDetector {
 public:
  HhtCuDetector(PosteriorClassifier model, HhtCuConfig config, std::uint64_t seed);

  DetectorStatus observe(std::size_t t, std::span<const double> x, MeteredStream& oracle);

  const PosteriorClassifier& model() const { return model_; }
  const HhtCuConfig& config() const { return config_; }

  const std::vector<std::size_t>& potential_drifts() const { return potential_; }
  const std::vector<std::size_t>& confirmed_drifts() const { return confirmed_; }
  const std::vector<std::size_t>& deferred_drifts() const { return deferred_; }

  // Layer-I internals, exposed so the running-minimum snapshot rule and the
  // firing condition can be replayed externally.
  std::size_t sample_count() const { return mean_.count(); }
  double running_mean() const { return mean_.mean(); }
  double running_bound() const { return mean_.bound(config_.theta1); }
  bool has_reference() const { return reference_count_ > 0; }
  double reference_mean() const { return reference_mean_; }
  double reference_bound() const { return reference_bound_; }
  std::size_t reference_count() const { return reference_count_; }

  // Gap between the running mean and the cutoff mean; 0 until both exist.
  // This is the quantity compared against the split bound, logged per item.
  double layer1_statistic() const;

 private:
  void restart_layer1();

  PosteriorClassifier model_;
  HhtCuConfig config_;
  std::uint64_t seed_ = 0;
  std::size_t adjudications_ = 0;

  stats::RunningBoundedMean mean_;
  double reference_mean_ = 0.0;
  double reference_bound_ = 0.0;
  std::size_t reference_count_ = 0;

  std::vector<std::size_t> potential_;
  std::vector<std::size_t> confirmed_;
  std::vector<std::size_t> deferred_;
};

struct HhtAgConfig {
  double theta1 = 0.001;  // Layer-I per-attribute KS significance
  double theta2 = 0.001;  // Layer-II per-attribute 2D KS significance
  std::size_t window = 100;  // N: size of each attribute window
  std::size_t permutations = 1999;
  // With the confirmation stage disabled every Layer-I rejection is
  // immediately a confirmed drift and no labels are requested; this is the
  // attribute-wise KS baseline.
  bool layer2_enabled = true;

  void validate() const;
};

// Streaming detector that watches each feature attribute's marginal. Per
// attribute it freezes a baseline window W1 (the first N values since the
// last reset) and slides a recent window W2 (the latest N values); once both
// are full, a per-attribute two-sample KS test at theta1 fires Layer-I on
// any rejection. Layer-II then requests the labels of the frozen baseline
// and of the N items immediately after the rejection and runs, per
// attribute, a permutation-calibrated two-dimensional KS test at theta2 on
// the (attribute value, label) pairs of the two labeled windows; any
// rejection confirms the drift. The post-rejection window is disjoint from
// the data that fired Layer-I, so a false alarm is re-checked against fresh
// stationary evidence, while after a genuine change it contains post-change
// items only (the sliding window at rejection time still straddles the
// change point). When the stream ends inside that window the candidate is
// logged as deferred and stays unconfirmed. Every adjudication — confirmed,
// denied, or deferred — clears the windows and rebuilds them from the next
// item, so the Layer-I trajectory does not depend on Layer-II outcomes and
// the layer2-disabled variant fires at identical indices on identical
// streams.
class HhtAgDetector {
 public:
  HhtAgDetector(std::size_t dim, HhtAgConfig config, std::uint64_t seed);

  DetectorStatus observe(std::size_t t, std::span<const double> x, MeteredStream& oracle);

  const HhtAgConfig& config() const { return config_; }
  std::size_t dim() const { return dim_; }

  const std::vector<std::size_t>& potential_drifts() const { return potential_; }
  const std::vector<std::size_t>& confirmed_drifts() const { return confirmed_; }
  const std::vector<std::size_t>& deferred_drifts() const { return deferred_; }

  // Largest per-attribute KS statistic from the most recent item's Layer-I
  // sweep; 0 while the windows are still filling.
  double layer1_statistic() const { return last_statistic_; }

  // Stream index at which the current windows started rebuilding.
  std::size_t era_start() const { return era_start_; }

 private:
  static constexpr std::size_t kUnstarted = static_cast<std::size_t>(-1);

  void reset_windows(std::size_t next_index);

  std::size_t dim_ = 0;
  HhtAgConfig config_;
  std::uint64_t seed_ = 0;
  std::size_t adjudications_ = 0;

  std::size_t era_start_ = kUnstarted;
  std::vector<std::vector<double>> baseline_;         // per attribute, frozen once full
  std::vector<std::vector<double>> sorted_baseline_;  // sorted copy for the KS hot path
  std::vector<std::deque<double>> recent_;            // per attribute, sliding
  double last_statistic_ = 0.0;

  std::vector<std::size_t> potential_;
  std::vector<std::size_t> confirmed_;
  std::vector<std::size_t> deferred_;
};

}  // namespace drift

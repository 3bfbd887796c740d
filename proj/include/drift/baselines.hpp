#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drift/detectors.hpp"
#include "drift/oracle.hpp"
#include "drift/stats.hpp"
#include "drift/types.hpp"

namespace drift {

// Error-rate monitor: watches the running binomial error rate p and its
// standard error s = sqrt(p(1-p)/i), remembers the (p_min, s_min) reached at
// the lowest p+s point, and signals when p+s climbs scale*s_min above p_min.
// Minima are only tracked once the first error has been seen — with zero
// errors s degenerates to 0 and a single mistake in an otherwise perfect run
// would otherwise trip the detector.
struct DdmConfig {
  double warning_scale = 2.0;
  double drift_scale = 3.0;
  std::size_t min_samples = 30;

  void validate() const;
};

class DdmMonitor {
 public:
  explicit DdmMonitor(DdmConfig config = {});

  DetectorStatus observe(bool correct);
  void reset();

  std::size_t sample_count() const { return count_; }
  double error_rate() const;
  double error_std() const;
  bool has_minimum() const { return has_min_; }
  double min_rate() const { return min_rate_; }
  double min_std() const { return min_std_; }

 private:
  DdmConfig config_;
  std::size_t count_ = 0;
  std::size_t errors_ = 0;
  bool has_min_ = false;
  double min_rate_ = 0.0;
  double min_std_ = 0.0;
};

// Distance-based monitor: watches the spacing between consecutive errors.
// Stable concepts keep the mean spacing p' (and its spread s') near the best
// spacing seen; a shrinking (p' + 2s')/(p'_max + 2s'_max) ratio signals that
// errors are bunching up. Signals only re-evaluate on errors and stick
// between them; nothing fires before min_errors mistakes have been seen.
struct EddmConfig {
  double warning_ratio = 0.95;
  double drift_ratio = 0.90;
  std::size_t min_errors = 30;

  void validate() const;
};

class EddmMonitor {
 public:
  explicit EddmMonitor(EddmConfig config = {});

  DetectorStatus observe(bool correct);
  void reset();

  std::size_t error_count() const { return errors_; }
  double mean_distance() const { return distance_mean_; }
  double distance_std() const;
  // (spacing level) / (best spacing level) at the last error; 1 when unknown.
  // Drops below 1 as errors bunch up.
  double last_ratio() const { return last_ratio_; }

 private:
  EddmConfig config_;
  std::size_t count_ = 0;
  std::size_t errors_ = 0;
  std::size_t last_error_at_ = 0;
  std::size_t distances_ = 0;
  double distance_mean_ = 0.0;
  double distance_m2_ = 0.0;
  bool has_max_ = false;
  double max_level_ = 0.0;
  double last_ratio_ = 1.0;
  DetectorStatus zone_ = DetectorStatus::Stable;
};

// Hoeffding-bound monitor on the error indicator: the same running-mean /
// frozen-reference split used by the uncertainty detector, with range width
// 1. The reference snapshots the prefix with the lowest mean + bound; a gap
// above the split bound at alpha_warning warns, above it at alpha_drift
// drifts (and resets).
struct HddmConfig {
  double alpha_warning = 0.005;
  double alpha_drift = 0.001;

  void validate() const;
};

class HddmMonitor {
 public:
  explicit HddmMonitor(HddmConfig config = {});

  DetectorStatus observe(bool correct);
  void reset();

  std::size_t sample_count() const { return mean_.count(); }
  double error_rate() const { return mean_.mean(); }
  std::size_t reference_count() const { return reference_count_; }
  double reference_rate() const { return reference_mean_; }

 private:
  HddmConfig config_;
  stats::RunningBoundedMean mean_{1.0};
  bool has_reference_ = false;
  double reference_mean_ = 0.0;
  double reference_level_ = 0.0;  // mean + bound at the snapshot
  std::size_t reference_count_ = 0;
};

// Attribute-wise KS baseline: the sliding-window detector with the
// confirmation stage switched off, so every per-attribute KS rejection is
// immediately a confirmed drift and no labels are consumed by the detector
// itself (the harness spends N labels per drift on retraining).
class AttributeKsDetector {
 public:
  AttributeKsDetector(std::size_t dim, HhtAgConfig config, std::uint64_t seed);

  DetectorStatus observe(std::size_t t, std::span<const double> x, MeteredStream& oracle);

  const std::vector<std::size_t>& confirmed_drifts() const { return inner_.confirmed_drifts(); }
  const std::vector<std::size_t>& potential_drifts() const { return inner_.potential_drifts(); }
  const std::vector<std::size_t>& deferred_drifts() const { return inner_.deferred_drifts(); }
  double layer1_statistic() const { return inner_.layer1_statistic(); }
  const HhtAgConfig& config() const { return inner_.config(); }

 private:
  HhtAgDetector inner_;
};

}  // namespace drift

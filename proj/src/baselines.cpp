#include "drift/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace drift {

void DdmConfig::validate() const {
  if (!(warning_scale > 0.0)) throw std::invalid_argument("DdmConfig: warning_scale must be positive");
  if (!(drift_scale >= warning_scale)) {
    throw std::invalid_argument("DdmConfig: drift_scale must be >= warning_scale");
  }
  if (min_samples == 0) throw std::invalid_argument("DdmConfig: min_samples must be positive");
}

DdmMonitor::DdmMonitor(DdmConfig config) : config_(config) { config_.validate(); }

double DdmMonitor::error_rate() const {
  if (count_ == 0) return 0.0;
  return static_cast<double>(errors_) / static_cast<double>(count_);
}

double DdmMonitor::error_std() const {
  if (count_ == 0) return 0.0;
  const double p = error_rate();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(count_));
}

void DdmMonitor::reset() {
  count_ = 0;
  errors_ = 0;
  has_min_ = false;
  min_rate_ = 0.0;
  min_std_ = 0.0;
}

DetectorStatus DdmMonitor::observe(bool correct) {
  ++count_;
  if (!correct) ++errors_;

  const double p = error_rate();
  const double s = error_std();

  if (errors_ > 0 && (!has_min_ || p + s <= min_rate_ + min_std_)) {
    has_min_ = true;
    min_rate_ = p;
    min_std_ = s;
  }

  if (count_ < config_.min_samples || !has_min_) return DetectorStatus::Stable;

  if (p + s >= min_rate_ + config_.drift_scale * min_std_) {
    reset();
    return DetectorStatus::ConfirmedDrift;
  }
  if (p + s >= min_rate_ + config_.warning_scale * min_std_) {
    return DetectorStatus::PotentialDrift;
  }
  return DetectorStatus::Stable;
}

void EddmConfig::validate() const {
  if (!(drift_ratio > 0.0) || !(drift_ratio < 1.0)) {
    throw std::invalid_argument("EddmConfig: drift_ratio must lie in (0, 1)");
  }
  if (!(warning_ratio >= drift_ratio) || !(warning_ratio < 1.0)) {
    throw std::invalid_argument("EddmConfig: warning_ratio must lie in [drift_ratio, 1)");
  }
  if (min_errors < 2) throw std::invalid_argument("EddmConfig: min_errors must be at least 2");
}

EddmMonitor::EddmMonitor(EddmConfig config) : config_(config) { config_.validate(); }

double EddmMonitor::distance_std() const {
  if (distances_ == 0) return 0.0;
  return std::sqrt(distance_m2_ / static_cast<double>(distances_));
}

void EddmMonitor::reset() {
  count_ = 0;
  errors_ = 0;
  last_error_at_ = 0;
  distances_ = 0;
  distance_mean_ = 0.0;
  distance_m2_ = 0.0;
  has_max_ = false;
  max_level_ = 0.0;
  last_ratio_ = 1.0;
  zone_ = DetectorStatus::Stable;
}

DetectorStatus EddmMonitor::observe(bool correct) {
  ++count_;
  if (correct) return zone_;

  ++errors_;
  if (errors_ > 1) {
    const double distance = static_cast<double>(count_ - last_error_at_);
    ++distances_;
    const double delta = distance - distance_mean_;
    distance_mean_ += delta / static_cast<double>(distances_);
    distance_m2_ += delta * (distance - distance_mean_);
  }
  last_error_at_ = count_;
  if (distances_ == 0) return zone_;

  const double level = distance_mean_ + 2.0 * distance_std();
  if (!has_max_ || level > max_level_) {
    has_max_ = true;
    max_level_ = level;
  }

  if (errors_ < config_.min_errors || !(max_level_ > 0.0)) {
    zone_ = DetectorStatus::Stable;
    return zone_;
  }

  const double ratio = level / max_level_;
  last_ratio_ = ratio;
  if (ratio < config_.drift_ratio) {
    reset();
    return DetectorStatus::ConfirmedDrift;
  }
  zone_ = ratio < config_.warning_ratio ? DetectorStatus::PotentialDrift : DetectorStatus::Stable;
  return zone_;
}

void HddmConfig::validate() const {
  if (!(alpha_warning > 0.0) || !(alpha_warning < 1.0)) {
    throw std::invalid_argument("HddmConfig: alpha_warning must lie in (0, 1)");
  }
  if (!(alpha_drift > 0.0) || !(alpha_drift <= alpha_warning)) {
    throw std::invalid_argument("HddmConfig: alpha_drift must lie in (0, alpha_warning]");
  }
}

HddmMonitor::HddmMonitor(HddmConfig config) : config_(config) { config_.validate(); }

void HddmMonitor::reset() {
  mean_.reset();
  has_reference_ = false;
  reference_mean_ = 0.0;
  reference_level_ = 0.0;
  reference_count_ = 0;
}

DetectorStatus HddmMonitor::observe(bool correct) {
  mean_.add(correct ? 0.0 : 1.0);
  const double level = mean_.mean() + mean_.bound(config_.alpha_drift);

  if (!has_reference_ || level <= reference_level_) {
    has_reference_ = true;
    reference_mean_ = mean_.mean();
    reference_level_ = level;
    reference_count_ = mean_.count();
  }

  if (mean_.count() <= reference_count_) return DetectorStatus::Stable;

  const std::size_t recent = mean_.count() - reference_count_;
  const double gap = mean_.mean() - reference_mean_;
  if (gap >= stats::hoeffding_split_epsilon(reference_count_, recent, config_.alpha_drift, 1.0)) {
    reset();
    return DetectorStatus::ConfirmedDrift;
  }
  if (gap >= stats::hoeffding_split_epsilon(reference_count_, recent, config_.alpha_warning, 1.0)) {
    return DetectorStatus::PotentialDrift;
  }
  return DetectorStatus::Stable;
}

AttributeKsDetector::AttributeKsDetector(std::size_t dim, HhtAgConfig config, std::uint64_t seed)
    : inner_(dim, [&config] {
        config.layer2_enabled = false;
        return config;
      }(), seed) {}

DetectorStatus AttributeKsDetector::observe(std::size_t t, std::span<const double> x,
                                            MeteredStream& oracle) {
  return inner_.observe(t, x, oracle);
}

}  // namespace drift

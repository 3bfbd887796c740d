#include "drift/detectors.hpp"

#include <algorithm>
#include <stdexcept>

#include "drift/rng.hpp"

namespace drift {

namespace {

void check_significance(double value, const char* what) {
  if (!(value > 0.0) || !(value < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
  }
}

std::size_t pool_class_count(std::span<const Sample> pool) {
  int max_label = -1;
  for (const Sample& s : pool) max_label = std::max(max_label, s.y);
  return static_cast<std::size_t>(max_label + 1);
}

}  // namespace

void Layer2Config::validate() const {
  check_significance(significance, "Layer2Config: significance");
  if (permutations == 0) throw std::invalid_argument("Layer2Config: permutations must be positive");
  if (static_cast<double>(permutations + 1) * significance <= 1.0) {
    throw std::invalid_argument(
        "Layer2Config: smallest reachable p-value 1/(permutations+1) cannot fall below the "
        "significance level; increase permutations");
  }
  if (training.epochs == 0) throw std::invalid_argument("Layer2Config: training epochs must be positive");
}

bool hht_cu_layer2(const LabeledWindow& pool, const Layer2Config& config, std::uint64_t seed) {
  config.validate();
  if (pool.size() < 4 || pool.size() % 2 != 0) {
    throw std::invalid_argument("hht_cu_layer2: pool must hold an even number (>= 4) of samples");
  }
  if (pool.single_class()) return false;  // nothing to fit, never confirm

  const std::span<const Sample> samples(pool.items());
  const std::size_t split = pool.size() / 2;
  const std::size_t classes = pool_class_count(samples);

  const auto fit_loss = [&](std::span<const Sample> fit_on,
                            std::span<const Sample> score_on) -> double {
    const PosteriorClassifier model = PosteriorClassifier::train(fit_on, config.training, seed, classes);
    return model.zero_one_loss(score_on);
  };

  const stats::SplitLossFn forward = [&](std::span<const Sample> first,
                                         std::span<const Sample> second) {
    return fit_loss(first, second);
  };
  const stats::SplitLossFn reverse = [&](std::span<const Sample> first,
                                         std::span<const Sample> second) {
    return fit_loss(second, first);
  };

  const std::span<const Sample> first = samples.subspan(0, split);
  const std::span<const Sample> second = samples.subspan(split);

  const double observed_forward = forward(first, second);
  const auto p_forward = stats::permutation_test(samples, split, observed_forward,
                                                 config.permutations, derive_seed(seed, 1), forward);
  if (p_forward && *p_forward < config.significance) return true;

  const double observed_reverse = reverse(first, second);
  const auto p_reverse = stats::permutation_test(samples, split, observed_reverse,
                                                 config.permutations, derive_seed(seed, 2), reverse);
  return p_reverse && *p_reverse < config.significance;
}

void HhtCuConfig::validate() const {
  check_significance(theta1, "HhtCuConfig: theta1");
  if (window == 0) throw std::invalid_argument("HhtCuConfig: window must be positive");
  if (min_reference_count == 0) {
    throw std::invalid_argument("HhtCuConfig: min_reference_count must be positive");
  }
  layer2().validate();  // covers theta2 and permutations
}

Layer2Config HhtCuConfig::layer2() const {
  Layer2Config cfg;
  cfg.significance = theta2;
  cfg.permutations = permutations;
  return cfg;
}

HhtCuDetector::HhtCuDetector(PosteriorClassifier model, HhtCuConfig config, std::uint64_t seed)
    : model_(std::move(model)),
      config_(config),
      seed_(seed),
      mean_(uncertainty_range(model_.trained() ? model_.num_classes() : 2)) {
  config_.validate();
  if (!model_.trained()) throw std::invalid_argument("HhtCuDetector: model must be trained");
}

double HhtCuDetector::layer1_statistic() const {
  if (reference_count_ == 0 || mean_.count() == 0) return 0.0;
  return mean_.mean() - reference_mean_;
}

void HhtCuDetector::restart_layer1() {
  mean_.reset();
  reference_mean_ = 0.0;
  reference_bound_ = 0.0;
  reference_count_ = 0;
}

DetectorStatus HhtCuDetector::observe(std::size_t t, std::span<const double> x,
                                      MeteredStream& oracle) {
  const double u = uncertainty(model_.posterior(x));
  mean_.add(u);
  const double bound = mean_.bound(config_.theta1);

  // Running-minimum snapshot: the reference tracks the prefix with the lowest
  // upper confidence bound seen so far (ties refresh it, favouring the longer
  // prefix and therefore the tighter bound).
  if (reference_count_ == 0 || mean_.mean() + bound <= reference_mean_ + reference_bound_) {
    reference_mean_ = mean_.mean();
    reference_bound_ = bound;
    reference_count_ = mean_.count();
  }

  if (mean_.count() < 2 || reference_count_ < config_.min_reference_count ||
      mean_.count() <= reference_count_) {
    return DetectorStatus::Stable;
  }

  const std::size_t recent = mean_.count() - reference_count_;
  const double threshold = stats::hoeffding_split_epsilon(reference_count_, recent, config_.theta1,
                                                          mean_.range_width());
  if (mean_.mean() - reference_mean_ < threshold) return DetectorStatus::Stable;

  // Layer-I fired: candidate drift at t needs the surrounding 2N labels.
  potential_.push_back(t);
  const std::size_t n = config_.window;
  if (t < n || !oracle.can_request(t - n, t + n)) {
    deferred_.push_back(t);
    restart_layer1();
    return DetectorStatus::PotentialDrift;
  }

  const LabeledWindow pool = oracle.request_labels(t - n, t + n);
  const bool confirmed = hht_cu_layer2(pool, config_.layer2(), derive_seed(seed_, adjudications_));
  ++adjudications_;

  if (!confirmed) {
    restart_layer1();
    return DetectorStatus::PotentialDrift;
  }

  confirmed_.push_back(t);
  const std::span<const Sample> fresh = std::span<const Sample>(pool.items()).subspan(n);
  model_ = PosteriorClassifier::train(fresh, config_.retraining, seed_, model_.num_classes());
  restart_layer1();
  return DetectorStatus::ConfirmedDrift;
}

void HhtAgConfig::validate() const {
  check_significance(theta1, "HhtAgConfig: theta1");
  if (window == 0) throw std::invalid_argument("HhtAgConfig: window must be positive");
  if (layer2_enabled) {
    check_significance(theta2, "HhtAgConfig: theta2");
    if (permutations == 0) throw std::invalid_argument("HhtAgConfig: permutations must be positive");
    if (static_cast<double>(permutations + 1) * theta2 <= 1.0) {
      throw std::invalid_argument(
          "HhtAgConfig: smallest reachable p-value 1/(permutations+1) cannot fall below theta2; "
          "increase permutations");
    }
  }
}

HhtAgDetector::HhtAgDetector(std::size_t dim, HhtAgConfig config, std::uint64_t seed)
    : dim_(dim), config_(config), seed_(seed) {
  config_.validate();
  if (dim_ == 0) throw std::invalid_argument("HhtAgDetector: dim must be positive");
  baseline_.resize(dim_);
  sorted_baseline_.resize(dim_);
  recent_.resize(dim_);
}

void HhtAgDetector::reset_windows(std::size_t next_index) {
  for (auto& w : baseline_) w.clear();
  for (auto& w : sorted_baseline_) w.clear();
  for (auto& w : recent_) w.clear();
  era_start_ = next_index;
  last_statistic_ = 0.0;
}

DetectorStatus HhtAgDetector::observe(std::size_t t, std::span<const double> x,
                                      MeteredStream& oracle) {
  if (x.size() != dim_) throw std::invalid_argument("HhtAgDetector: feature dimension mismatch");
  if (era_start_ == kUnstarted) era_start_ = t;
  last_statistic_ = 0.0;

  const std::size_t n = config_.window;
  const std::size_t local = t - era_start_;

  if (local < n) {
    for (std::size_t k = 0; k < dim_; ++k) baseline_[k].push_back(x[k]);
    if (local + 1 == n) {
      for (std::size_t k = 0; k < dim_; ++k) {
        sorted_baseline_[k] = baseline_[k];
        std::sort(sorted_baseline_[k].begin(), sorted_baseline_[k].end());
      }
    }
    return DetectorStatus::Stable;
  }

  for (std::size_t k = 0; k < dim_; ++k) {
    recent_[k].push_back(x[k]);
    if (recent_[k].size() > n) recent_[k].pop_front();
  }
  if (local < 2 * n) return DetectorStatus::Stable;

  bool fired = false;
  std::vector<double> sorted_recent;
  for (std::size_t k = 0; k < dim_; ++k) {
    sorted_recent.assign(recent_[k].begin(), recent_[k].end());
    std::sort(sorted_recent.begin(), sorted_recent.end());
    const stats::KsResult ks =
        stats::ks_two_sample_sorted(sorted_baseline_[k], sorted_recent, config_.theta1);
    last_statistic_ = std::max(last_statistic_, ks.statistic);
    if (ks.reject) fired = true;
  }
  if (!fired) return DetectorStatus::Stable;

  potential_.push_back(t);
  if (!config_.layer2_enabled) {
    confirmed_.push_back(t);
    reset_windows(t + 1);
    return DetectorStatus::ConfirmedDrift;
  }

  // Confirmation evidence: the frozen baseline labels against the N items
  // immediately after the rejection. Those items played no part in the
  // statistic that fired Layer-I, and after an abrupt change they lie fully
  // past the change point, whereas the sliding window at rejection time
  // still straddles it.
  if (!oracle.can_request(t + 1, t + 1 + n)) {
    deferred_.push_back(t);
    reset_windows(t + 1);
    return DetectorStatus::PotentialDrift;
  }
  const LabeledWindow w1 = oracle.request_labels(era_start_, era_start_ + n);
  const LabeledWindow w2 = oracle.request_labels(t + 1, t + 1 + n);

  bool confirmed = false;
  std::vector<stats::Point2> a(n);
  std::vector<stats::Point2> b(n);
  for (std::size_t k = 0; k < dim_ && !confirmed; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = {w1.items()[i].x[k], static_cast<double>(w1.items()[i].y)};
      b[i] = {w2.items()[i].x[k], static_cast<double>(w2.items()[i].y)};
    }
    const stats::Ks2dResult r = stats::ks2d_two_sample(
        a, b, config_.theta2, config_.permutations, derive_seed(seed_, adjudications_ * dim_ + k));
    if (r.reject) confirmed = true;
  }
  ++adjudications_;

  reset_windows(t + 1);
  if (!confirmed) return DetectorStatus::PotentialDrift;
  confirmed_.push_back(t);
  return DetectorStatus::ConfirmedDrift;
}

}  // namespace drift

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "drift/types.hpp"

namespace drift {

/// Hyperparameters for full-batch gradient-descent training of the softmax
/// model. Training is deterministic: fixed epoch count, fixed step size,
/// zero-initialized weights.
struct TrainingConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.1;
  double l2 = 1e-4;
};

/// Multinomial logistic regression over standardized features: K x (d+1)
/// weights (bias last), posteriors via softmax. Feature mean/scale are
/// estimated on the training window and stored with the model, so inputs at
/// prediction time are standardized identically. Softmax never returns an
/// exact zero, so classes absent from the training window keep a small floor
/// probability.
class PosteriorClassifier {
 public:
  PosteriorClassifier() = default;

  /// Trains on the window; `num_classes` = 0 deduces K from the labels.
  /// Labels must lie in [0, K). Same window, config and seed give bit-wise
  /// identical weights. Throws std::invalid_argument on empty windows,
  /// zero-dimensional features, out-of-range labels, or a deduced K < 2.
  static PosteriorClassifier train(const LabeledWindow& window, const TrainingConfig& config,
                                   std::uint64_t seed, std::size_t num_classes = 0);
  static PosteriorClassifier train(std::span<const Sample> window, const TrainingConfig& config,
                                   std::uint64_t seed, std::size_t num_classes = 0);

  /// Class posteriors for one feature vector; entries are positive and sum
  /// to 1 within floating-point rounding.
  std::vector<double> posterior(std::span<const double> x) const;

  /// Arg-max class, ties resolved to the lowest index.
  int predict(std::span<const double> x) const;

  /// Fraction of samples whose prediction disagrees with the label.
  double zero_one_loss(const LabeledWindow& data) const;
  double zero_one_loss(std::span<const Sample> data) const;

  bool trained() const { return !weights_.empty(); }
  std::size_t num_classes() const { return k_; }
  std::size_t num_features() const { return d_; }
  /// Row-major K x (d+1), feature weights then bias.
  const std::vector<double>& weights() const { return weights_; }

  nlohmann::json to_json() const;
  static PosteriorClassifier from_json(const nlohmann::json& j);

 private:
  std::size_t k_ = 0;
  std::size_t d_ = 0;
  std::vector<double> weights_;
  std::vector<double> feature_mean_;
  std::vector<double> feature_scale_;
  // training provenance
  std::size_t trained_on_ = 0;
  std::size_t epochs_ = 0;
  double learning_rate_ = 0.0;
  double l2_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Index of the largest entry, ties resolved to the lowest index.
std::size_t argmax_index(std::span<const double> values);

/// 1-of-K encoding of the posterior's arg-max (ties to the lowest index).
std::vector<double> label_encoding(std::span<const double> posterior);

/// Classification uncertainty: the L2 distance between a posterior and the
/// 1-of-K encoding of its arg-max. 0 for a fully confident posterior and at
/// most sqrt((K-1)/K), attained at the uniform posterior. Throws
/// std::domain_error if the entries are not a probability vector (each in
/// [0,1], summing to 1 within 1e-6).
double uncertainty(std::span<const double> posterior);

/// Width of the uncertainty range for K classes: sqrt((K-1)/K).
double uncertainty_range(std::size_t num_classes);

/// Regularized cross-entropy objective and its gradient on raw features,
/// weights laid out K x (d+1) with the bias last (bias excluded from the L2
/// term). Exposed so tests can check the analytic gradient against finite
/// differences; train() runs the same code on standardized data.
double softmax_loss(std::span<const Sample> data, std::size_t num_classes,
                    std::span<const double> weights, double l2);
std::vector<double> softmax_gradient(std::span<const Sample> data, std::size_t num_classes,
                                     std::span<const double> weights, double l2);

}  // namespace drift

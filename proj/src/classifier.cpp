#include "drift/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drift {

namespace {

void validate_window(std::span<const Sample> data, std::size_t num_classes) {
  if (data.empty()) throw std::invalid_argument("train: empty window");
  const std::size_t d = data.front().x.size();
  if (d == 0) throw std::invalid_argument("train: zero-dimensional features");
  for (const auto& s : data) {
    if (s.x.size() != d) throw std::invalid_argument("train: feature dimension mismatch");
    if (s.y < 0 || static_cast<std::size_t>(s.y) >= num_classes) {
      throw std::invalid_argument("train: label " + std::to_string(s.y) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
  }
}

std::size_t deduce_classes(std::span<const Sample> data) {
  int max_label = -1;
  for (const auto& s : data) max_label = std::max(max_label, s.y);
  return static_cast<std::size_t>(max_label + 1);
}

void softmax_inplace(std::vector<double>& scores) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (auto& s : scores) s /= sum;
}

}  // namespace

double softmax_loss(std::span<const Sample> data, std::size_t num_classes,
                    std::span<const double> weights, double l2) {
  const std::size_t d = data.front().x.size();
  const std::size_t row = d + 1;
  double loss = 0.0;
  std::vector<double> scores(num_classes);
  for (const auto& s : data) {
    for (std::size_t k = 0; k < num_classes; ++k) {
      const double* w = weights.data() + k * row;
      double dot = w[d];
      for (std::size_t j = 0; j < d; ++j) dot += w[j] * s.x[j];
      scores[k] = dot;
    }
    const double mx = *std::max_element(scores.begin(), scores.end());
    double lse = 0.0;
    for (double v : scores) lse += std::exp(v - mx);
    loss += (mx + std::log(lse)) - scores[static_cast<std::size_t>(s.y)];
  }
  loss /= static_cast<double>(data.size());
  double penalty = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double* w = weights.data() + k * row;
    for (std::size_t j = 0; j < d; ++j) penalty += w[j] * w[j];
  }
  return loss + 0.5 * l2 * penalty;
}

std::vector<double> softmax_gradient(std::span<const Sample> data, std::size_t num_classes,
                                     std::span<const double> weights, double l2) {
  const std::size_t d = data.front().x.size();
  const std::size_t row = d + 1;
  std::vector<double> grad(num_classes * row, 0.0);
  std::vector<double> scores(num_classes);
  for (const auto& s : data) {
    for (std::size_t k = 0; k < num_classes; ++k) {
      const double* w = weights.data() + k * row;
      double dot = w[d];
      for (std::size_t j = 0; j < d; ++j) dot += w[j] * s.x[j];
      scores[k] = dot;
    }
    softmax_inplace(scores);
    scores[static_cast<std::size_t>(s.y)] -= 1.0;  // p - onehot(y)
    for (std::size_t k = 0; k < num_classes; ++k) {
      double* g = grad.data() + k * row;
      const double r = scores[k];
      for (std::size_t j = 0; j < d; ++j) g[j] += r * s.x[j];
      g[d] += r;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t k = 0; k < num_classes; ++k) {
    double* g = grad.data() + k * row;
    const double* w = weights.data() + k * row;
    for (std::size_t j = 0; j < d; ++j) g[j] = g[j] * inv_n + l2 * w[j];
    g[d] *= inv_n;  // bias carries no penalty
  }
  return grad;
}

PosteriorClassifier PosteriorClassifier::train(const LabeledWindow& window,
                                               const TrainingConfig& config, std::uint64_t seed,
                                               std::size_t num_classes) {
  return train(std::span<const Sample>(window.items()), config, seed, num_classes);
}

PosteriorClassifier PosteriorClassifier::train(std::span<const Sample> window,
                                               const TrainingConfig& config, std::uint64_t seed,
                                               std::size_t num_classes) {
  std::size_t k = num_classes != 0 ? num_classes : deduce_classes(window);
  if (k < 2) {
    throw std::invalid_argument("train: need at least two classes (labels cover fewer)");
  }
  validate_window(window, k);

  PosteriorClassifier model;
  model.k_ = k;
  model.d_ = window.front().x.size();
  model.trained_on_ = window.size();
  model.epochs_ = config.epochs;
  model.learning_rate_ = config.learning_rate;
  model.l2_ = config.l2;
  model.seed_ = seed;

  // Standardize features on the training window; remember the transform.
  const std::size_t d = model.d_;
  model.feature_mean_.assign(d, 0.0);
  model.feature_scale_.assign(d, 1.0);
  for (const auto& s : window) {
    for (std::size_t j = 0; j < d; ++j) model.feature_mean_[j] += s.x[j];
  }
  for (std::size_t j = 0; j < d; ++j) model.feature_mean_[j] /= static_cast<double>(window.size());
  std::vector<double> var(d, 0.0);
  for (const auto& s : window) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = s.x[j] - model.feature_mean_[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(window.size()));
    model.feature_scale_[j] = sd > 1e-12 ? sd : 1.0;
  }

  std::vector<Sample> scaled(window.begin(), window.end());
  for (auto& s : scaled) {
    for (std::size_t j = 0; j < d; ++j) {
      s.x[j] = (s.x[j] - model.feature_mean_[j]) / model.feature_scale_[j];
    }
  }

  model.weights_.assign(k * (d + 1), 0.0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto grad = softmax_gradient(scaled, k, model.weights_, config.l2);
    for (std::size_t i = 0; i < model.weights_.size(); ++i) {
      model.weights_[i] -= config.learning_rate * grad[i];
    }
  }
  return model;
}

std::vector<double> PosteriorClassifier::posterior(std::span<const double> x) const {
  if (!trained()) throw std::logic_error("posterior: model is untrained");
  if (x.size() != d_) throw std::invalid_argument("posterior: feature dimension mismatch");
  const std::size_t row = d_ + 1;
  std::vector<double> scores(k_);
  for (std::size_t k = 0; k < k_; ++k) {
    const double* w = weights_.data() + k * row;
    double dot = w[d_];
    for (std::size_t j = 0; j < d_; ++j) {
      dot += w[j] * (x[j] - feature_mean_[j]) / feature_scale_[j];
    }
    scores[k] = dot;
  }
  softmax_inplace(scores);
  return scores;
}

int PosteriorClassifier::predict(std::span<const double> x) const {
  return static_cast<int>(argmax_index(posterior(x)));
}

double PosteriorClassifier::zero_one_loss(std::span<const Sample> data) const {
  if (data.empty()) throw std::invalid_argument("zero_one_loss: empty data");
  std::size_t wrong = 0;
  for (const auto& s : data) {
    if (predict(s.x) != s.y) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double PosteriorClassifier::zero_one_loss(const LabeledWindow& data) const {
  return zero_one_loss(std::span<const Sample>(data.items()));
}

nlohmann::json PosteriorClassifier::to_json() const {
  return nlohmann::json{{"classes", k_},
                        {"features", d_},
                        {"weights", weights_},
                        {"feature_mean", feature_mean_},
                        {"feature_scale", feature_scale_},
                        {"meta",
                         {{"window", trained_on_},
                          {"epochs", epochs_},
                          {"learning_rate", learning_rate_},
                          {"l2", l2_},
                          {"seed", seed_}}}};
}

PosteriorClassifier PosteriorClassifier::from_json(const nlohmann::json& j) {
  PosteriorClassifier model;
  model.k_ = j.at("classes").get<std::size_t>();
  model.d_ = j.at("features").get<std::size_t>();
  model.weights_ = j.at("weights").get<std::vector<double>>();
  model.feature_mean_ = j.at("feature_mean").get<std::vector<double>>();
  model.feature_scale_ = j.at("feature_scale").get<std::vector<double>>();
  if (model.weights_.size() != model.k_ * (model.d_ + 1) ||
      model.feature_mean_.size() != model.d_ || model.feature_scale_.size() != model.d_) {
    throw std::invalid_argument("PosteriorClassifier::from_json: inconsistent shapes");
  }
  const auto& meta = j.at("meta");
  model.trained_on_ = meta.at("window").get<std::size_t>();
  model.epochs_ = meta.at("epochs").get<std::size_t>();
  model.learning_rate_ = meta.at("learning_rate").get<double>();
  model.l2_ = meta.at("l2").get<double>();
  model.seed_ = meta.at("seed").get<std::uint64_t>();
  return model;
}

std::size_t argmax_index(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax_index: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;  // strict: ties keep the lowest index
  }
  return best;
}

std::vector<double> label_encoding(std::span<const double> posterior) {
  std::vector<double> e(posterior.size(), 0.0);
  e[argmax_index(posterior)] = 1.0;
  return e;
}

double uncertainty(std::span<const double> posterior) {
  if (posterior.empty()) throw std::domain_error("uncertainty: empty posterior");
  double sum = 0.0;
  for (double p : posterior) {
    if (p < -1e-9 || p > 1.0 + 1e-9) throw std::domain_error("uncertainty: entry outside [0, 1]");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-6) {
    throw std::domain_error("uncertainty: posterior does not sum to 1");
  }
  const std::size_t top = argmax_index(posterior);
  double sq = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const double diff = (i == top ? 1.0 : 0.0) - posterior[i];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

double uncertainty_range(std::size_t num_classes) {
  if (num_classes < 2) throw std::domain_error("uncertainty_range: need at least two classes");
  const double k = static_cast<double>(num_classes);
  return std::sqrt((k - 1.0) / k);
}

}  // namespace drift

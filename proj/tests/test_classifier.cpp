#include <doctest.h>

#include <cmath>
#include <vector>

#include "drift/classifier.hpp"
#include "drift/rng.hpp"
#include "drift/types.hpp"

using drift::LabeledWindow;
using drift::PosteriorClassifier;
using drift::Rng;
using drift::Sample;
using drift::TrainingConfig;

namespace {

// Two Gaussian blobs along the first axis, labels 0/1.
LabeledWindow two_blobs(std::size_t per_class, double gap, std::uint64_t seed) {
  Rng rng(seed);
  LabeledWindow window;
  for (std::size_t i = 0; i < per_class; ++i) {
    window.push_back({{-gap / 2 + rng.normal(), rng.normal()}, 0});
    window.push_back({{+gap / 2 + rng.normal(), rng.normal()}, 1});
  }
  return window;
}

PosteriorClassifier model_from_weights(std::size_t classes, std::size_t features,
                                       const std::vector<double>& weights) {
  nlohmann::json j{{"classes", classes},
                   {"features", features},
                   {"weights", weights},
                   {"feature_mean", std::vector<double>(features, 0.0)},
                   {"feature_scale", std::vector<double>(features, 1.0)},
                   {"meta",
                    {{"window", 0},
                     {"epochs", 0},
                     {"learning_rate", 0.0},
                     {"l2", 0.0},
                     {"seed", 0}}}};
  return PosteriorClassifier::from_json(j);
}

}  // namespace

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(42);
  for (int instance = 0; instance < 20; ++instance) {
    const std::size_t k = 2 + rng.index(3);   // 2..4 classes
    const std::size_t d = 1 + rng.index(3);   // 1..3 features
    const std::size_t n = 5 + rng.index(10);  // 5..14 samples
    std::vector<Sample> data(n);
    for (auto& s : data) {
      s.x.resize(d);
      for (auto& v : s.x) v = rng.normal();
      s.y = static_cast<int>(rng.index(k));
    }
    std::vector<double> w(k * (d + 1));
    for (auto& v : w) v = 0.5 * rng.normal();
    const double l2 = instance % 2 == 0 ? 1e-3 : 0.0;

    const std::vector<double> grad = drift::softmax_gradient(data, k, w, l2);
    const double h = 1e-6;
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::vector<double> plus = w;
      std::vector<double> minus = w;
      plus[i] += h;
      minus[i] -= h;
      const double numeric =
          (drift::softmax_loss(data, k, plus, l2) - drift::softmax_loss(data, k, minus, l2)) /
          (2 * h);
      const double scale = std::max({1.0, std::fabs(numeric), std::fabs(grad[i])});
      CHECK(std::fabs(grad[i] - numeric) / scale < 1e-5);
    }
  }
}

TEST_CASE("training is deterministic and separates clean blobs") {
  const LabeledWindow window = two_blobs(100, 6.0, 7);
  const TrainingConfig config;
  const PosteriorClassifier a = PosteriorClassifier::train(window, config, 3);
  const PosteriorClassifier b = PosteriorClassifier::train(window, config, 3);
  CHECK(a.weights() == b.weights());  // bit-identical

  CHECK(a.trained());
  CHECK(a.num_classes() == 2);
  CHECK(a.num_features() == 2);
  CHECK(a.zero_one_loss(window) <= 0.05);  // window accuracy >= 0.95
}

TEST_CASE("train/evaluate split on separable blobs transfers") {
  const LabeledWindow window = two_blobs(100, 6.0, 11);
  const std::span<const Sample> all(window.items());
  const auto first = all.subspan(0, window.size() / 2);
  const auto second = all.subspan(window.size() / 2);
  const PosteriorClassifier model = PosteriorClassifier::train(first, TrainingConfig{}, 1);
  CHECK(model.zero_one_loss(second) <= 0.1);
}

TEST_CASE("no-signal window yields class priors") {
  LabeledWindow window;
  for (int i = 0; i < 30; ++i) window.push_back({{1.5}, 0});
  for (int i = 0; i < 10; ++i) window.push_back({{1.5}, 1});
  const PosteriorClassifier model = PosteriorClassifier::train(window, TrainingConfig{}, 1);
  const std::vector<double> p = model.posterior(std::vector<double>{1.5});
  CHECK(p[0] == doctest::Approx(0.75).epsilon(0.02));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("posterior is a probability vector; zero weights give uniform") {
  const PosteriorClassifier zero = model_from_weights(3, 2, std::vector<double>(9, 0.0));
  const std::vector<double> u = zero.posterior(std::vector<double>{0.4, -1.0});
  for (double v : u) CHECK(v == doctest::Approx(1.0 / 3));

  const LabeledWindow window = two_blobs(50, 2.0, 5);
  const PosteriorClassifier model = PosteriorClassifier::train(window, TrainingConfig{}, 1);
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{4.0 * rng.normal(), 4.0 * rng.normal()};
    const std::vector<double> p = model.posterior(x);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("softmax margin monotonicity on a fixed tiny model") {
  // Class 0 scores x, class 1 scores 0: at x=0 the posterior is (0.5, 0.5)
  // and grows monotonically toward (1, 0) with x.
  const PosteriorClassifier model = model_from_weights(2, 1, {1.0, 0.0, 0.0, 0.0});
  const std::vector<double> at_zero = model.posterior(std::vector<double>{0.0});
  CHECK(at_zero[0] == doctest::Approx(0.5));
  CHECK(at_zero[1] == doctest::Approx(0.5));

  double previous = 0.5;
  for (double x = 0.5; x <= 8.0; x += 0.5) {
    const double p0 = model.posterior(std::vector<double>{x})[0];
    CHECK(p0 > previous);
    previous = p0;
  }
  CHECK(previous > 0.99);
}

TEST_CASE("label encoding picks the argmax, ties to the lowest index") {
  CHECK(drift::label_encoding(std::vector<double>{0.2, 0.8}) == std::vector<double>{0.0, 1.0});
  CHECK(drift::label_encoding(std::vector<double>{0.5, 0.5}) == std::vector<double>{1.0, 0.0});
  CHECK(drift::label_encoding(std::vector<double>{0.1, 0.2, 0.7}) ==
        std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("uncertainty closed-form values") {
  CHECK(drift::uncertainty(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0));
  CHECK(drift::uncertainty(std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(drift::uncertainty(std::vector<double>{0.5, 0.3, 0.2}) ==
        doctest::Approx(0.6164414002968976).epsilon(1e-12));

  CHECK(drift::uncertainty_range(2) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(drift::uncertainty_range(3) == doctest::Approx(0.816496580927726).epsilon(1e-12));
  CHECK(drift::uncertainty_range(5) == doctest::Approx(0.8944271909999159).epsilon(1e-12));
  CHECK_THROWS_AS(drift::uncertainty_range(1), std::domain_error);
}

TEST_CASE("uncertainty stays within its range over random simplex points") {
  Rng rng(19);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 2 + rng.index(5);
    std::vector<double> p(k);
    double sum = 0.0;
    for (auto& v : p) {
      v = -std::log(rng.uniform() + 1e-300);
      sum += v;
    }
    for (auto& v : p) v /= sum;
    const double u = drift::uncertainty(p);
    CHECK(u >= 0.0);
    CHECK(u <= drift::uncertainty_range(k) + 1e-12);
  }
}

TEST_CASE("uncertainty is invariant under class permutation for strict argmax") {
  const std::vector<double> p{0.6, 0.3, 0.1};
  const double reference = drift::uncertainty(p);
  CHECK(drift::uncertainty(std::vector<double>{0.1, 0.6, 0.3}) == doctest::Approx(reference));
  CHECK(drift::uncertainty(std::vector<double>{0.3, 0.1, 0.6}) == doctest::Approx(reference));
}

TEST_CASE("uncertainty rejects malformed posteriors") {
  CHECK_THROWS_AS(drift::uncertainty(std::vector<double>{0.9, 0.2}), std::domain_error);
  CHECK_THROWS_AS(drift::uncertainty(std::vector<double>{-0.1, 1.1}), std::domain_error);
  CHECK_THROWS_AS(drift::uncertainty(std::vector<double>{}), std::domain_error);
}

TEST_CASE("zero-one loss of constant and memorizing models") {
  // Huge class-0 bias: predicts 0 everywhere.
  const PosteriorClassifier constant = model_from_weights(2, 1, {0.0, 100.0, 0.0, 0.0});
  LabeledWindow balanced;
  for (int i = 0; i < 10; ++i) {
    balanced.push_back({{static_cast<double>(i)}, 0});
    balanced.push_back({{static_cast<double>(i)}, 1});
  }
  CHECK(constant.zero_one_loss(balanced) == doctest::Approx(0.5));

  const LabeledWindow window = two_blobs(50, 8.0, 13);
  const PosteriorClassifier model = PosteriorClassifier::train(window, TrainingConfig{}, 1);
  CHECK(model.zero_one_loss(window) == doctest::Approx(0.0));
}

TEST_CASE("training rejects malformed windows") {
  CHECK_THROWS_AS(PosteriorClassifier::train(LabeledWindow{}, TrainingConfig{}, 1),
                  std::invalid_argument);

  LabeledWindow single;
  single.push_back({{1.0}, 0});
  single.push_back({{2.0}, 0});
  CHECK_THROWS_AS(PosteriorClassifier::train(single, TrainingConfig{}, 1),
                  std::invalid_argument);  // deduced K < 2

  LabeledWindow bad_label;
  bad_label.push_back({{1.0}, 0});
  bad_label.push_back({{2.0}, 3});
  CHECK_THROWS_AS(PosteriorClassifier::train(bad_label, TrainingConfig{}, 1, 2),
                  std::invalid_argument);  // label outside [0, K)

  const LabeledWindow window = two_blobs(10, 4.0, 3);
  const PosteriorClassifier model = PosteriorClassifier::train(window, TrainingConfig{}, 1);
  CHECK_THROWS_AS(model.posterior(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("explicit class count keeps unseen classes at a probability floor") {
  LabeledWindow window;
  Rng rng(29);
  for (int i = 0; i < 40; ++i) {
    window.push_back({{rng.normal() - 2.0}, 0});
    window.push_back({{rng.normal() + 2.0}, 1});
  }
  const PosteriorClassifier model = PosteriorClassifier::train(window, TrainingConfig{}, 1, 3);
  CHECK(model.num_classes() == 3);
  const std::vector<double> p = model.posterior(std::vector<double>{0.0});
  CHECK(p.size() == 3);
  CHECK(p[2] > 0.0);
  CHECK(p[2] < 0.5);
}

TEST_CASE("JSON round-trip preserves behavior exactly") {
  const LabeledWindow window = two_blobs(40, 3.0, 17);
  const PosteriorClassifier model = PosteriorClassifier::train(window, TrainingConfig{}, 99);
  const PosteriorClassifier copy = PosteriorClassifier::from_json(model.to_json());
  CHECK(copy.weights() == model.weights());
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> x{rng.normal(), rng.normal()};
    CHECK(copy.posterior(x) == model.posterior(x));
  }

  nlohmann::json broken = model.to_json();
  broken["weights"] = std::vector<double>{1.0};
  CHECK_THROWS_AS(PosteriorClassifier::from_json(broken), std::invalid_argument);
}

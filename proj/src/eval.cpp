#include "drift/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace drift {

double MatchResult::precision() const {
  const std::size_t detections = true_positives + false_positives;
  if (detections == 0) return 0.0;
  return static_cast<double>(true_positives) / static_cast<double>(detections);
}

double MatchResult::recall() const {
  const std::size_t actual = true_positives + false_negatives;
  if (actual == 0) return 1.0;
  return static_cast<double>(true_positives) / static_cast<double>(actual);
}

double MatchResult::mean_delay() const {
  if (delays.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(delays.begin(), delays.end(), 0.0) / static_cast<double>(delays.size());
}

MatchResult match_detections(const std::vector<std::size_t>& true_drifts,
                             const std::vector<std::size_t>& detected,
                             double delay_range) {
  if (!(delay_range > 0.0)) throw std::invalid_argument("match_detections: delay_range must be positive");
  if (!std::is_sorted(true_drifts.begin(), true_drifts.end())) {
    throw std::invalid_argument("match_detections: true_drifts must be sorted ascending");
  }
  if (!std::is_sorted(detected.begin(), detected.end())) {
    throw std::invalid_argument("match_detections: detected must be sorted ascending");
  }

  MatchResult result;
  std::vector<bool> used(detected.size(), false);
  for (std::size_t drift : true_drifts) {
    bool matched = false;
    for (std::size_t i = 0; i < detected.size(); ++i) {
      if (used[i]) continue;
      const double delay = static_cast<double>(detected[i]) - static_cast<double>(drift);
      if (delay <= 0.0) continue;
      if (delay > delay_range) break;
      used[i] = true;
      matched = true;
      result.delays.push_back(delay);
      break;
    }
    if (matched) {
      ++result.true_positives;
    } else {
      ++result.false_negatives;
    }
  }
  for (bool u : used) {
    if (!u) ++result.false_positives;
  }
  return result;
}

std::vector<double> RangeGrid::values() const {
  if (!(min > 0.0)) throw std::invalid_argument("RangeGrid: min must be positive");
  if (!(max >= min)) throw std::invalid_argument("RangeGrid: max must be >= min");
  if (points < 2) throw std::invalid_argument("RangeGrid: need at least two points");
  std::vector<double> vals(points);
  const double step = (max - min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    vals[i] = min + step * static_cast<double>(i);
  }
  vals.back() = max;
  return vals;
}

nlohmann::json RangeGrid::to_json() const {
  return nlohmann::json{{"min", min}, {"max", max}, {"points", points}};
}

RangeGrid RangeGrid::from_json(const nlohmann::json& j) {
  RangeGrid g;
  g.min = j.at("min").get<double>();
  g.max = j.at("max").get<double>();
  if (j.contains("points")) g.points = j.at("points").get<std::size_t>();
  (void)g.values();  // validate
  return g;
}

RangeGrid RangeGrid::for_window(std::size_t window) {
  RangeGrid g;
  g.min = static_cast<double>(window) / 2.0;
  g.max = static_cast<double>(window) * 5.0;
  g.points = 20;
  return g;
}

RangeCurves range_curves(const std::vector<std::size_t>& true_drifts,
                         const std::vector<std::size_t>& detected,
                         const RangeGrid& grid) {
  RangeCurves curves;
  curves.ranges = grid.values();
  curves.precision.reserve(curves.ranges.size());
  curves.recall.reserve(curves.ranges.size());
  for (double r : curves.ranges) {
    const MatchResult m = match_detections(true_drifts, detected, r);
    curves.precision.push_back(m.precision());
    curves.recall.push_back(m.recall());
  }
  return curves;
}

double nauc(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("nauc: size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("nauc: need at least two points");
  double area = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double dx = xs[i] - xs[i - 1];
    if (!(dx > 0.0)) throw std::invalid_argument("nauc: xs must be strictly increasing");
    area += 0.5 * (ys[i] + ys[i - 1]) * dx;
  }
  return area / (xs.back() - xs.front());
}

double prequential_accuracy(const std::vector<int>& predictions, const std::vector<int>& truth) {
  if (predictions.size() != truth.size()) {
    throw std::invalid_argument("prequential_accuracy: size mismatch");
  }
  if (predictions.empty()) throw std::invalid_argument("prequential_accuracy: empty run");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truth[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

nlohmann::json DetectionReport::to_json() const {
  nlohmann::json curve = nlohmann::json::array();
  for (std::size_t i = 0; i < curves.ranges.size(); ++i) {
    curve.push_back(nlohmann::json{{"range", curves.ranges[i]},
                                   {"precision", curves.precision[i]},
                                   {"recall", curves.recall[i]}});
  }
  nlohmann::json j{{"tp", tp},
                   {"fp", fp},
                   {"fn", fn},
                   {"reference_range", reference_range},
                   {"nauc_precision", nauc_precision},
                   {"nauc_recall", nauc_recall},
                   {"accuracy", accuracy},
                   {"label_fraction", label_fraction},
                   {"curve", std::move(curve)}};
  if (std::isnan(mean_delay)) {
    j["mean_delay"] = nullptr;
  } else {
    j["mean_delay"] = mean_delay;
  }
  return j;
}

std::string DetectionReport::curve_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "range,precision,recall\n";
  for (std::size_t i = 0; i < curves.ranges.size(); ++i) {
    out << curves.ranges[i] << ',' << curves.precision[i] << ',' << curves.recall[i] << '\n';
  }
  return out.str();
}

DetectionReport score_run(const std::vector<std::size_t>& true_drifts,
                          const std::vector<std::size_t>& detected,
                          const RangeGrid& grid,
                          double reference_range,
                          const std::vector<int>& predictions,
                          const std::vector<int>& truth,
                          double label_fraction) {
  DetectionReport report;
  const MatchResult at_ref = match_detections(true_drifts, detected, reference_range);
  report.tp = at_ref.true_positives;
  report.fp = at_ref.false_positives;
  report.fn = at_ref.false_negatives;
  report.reference_range = reference_range;
  report.mean_delay = at_ref.mean_delay();
  report.curves = range_curves(true_drifts, detected, grid);
  report.nauc_precision = nauc(report.curves.ranges, report.curves.precision);
  report.nauc_recall = nauc(report.curves.ranges, report.curves.recall);
  report.accuracy = prequential_accuracy(predictions, truth);
  report.label_fraction = label_fraction;
  return report;
}

}  // namespace drift

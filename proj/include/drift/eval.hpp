#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace drift {

// Outcome of matching detections against true change points for one delay
// range. Each change point matches at most the earliest unmatched detection
// inside (t*, t* + range]; everything else a detector reports is a false
// positive, and unmatched change points are false negatives.
struct MatchResult {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::vector<double> delays;  // detection index minus change index, per TP

  double precision() const;  // tp / (tp + fp); defined as 0 when nothing was detected
  double recall() const;     // tp / (tp + fn); defined as 1 when there is nothing to detect
  double mean_delay() const; // NaN when there are no true positives
};

// Both index lists must be sorted ascending; throws std::invalid_argument
// otherwise. delay_range must be positive.
MatchResult match_detections(const std::vector<std::size_t>& true_drifts,
                             const std::vector<std::size_t>& detected,
                             double delay_range);

// Evenly spaced grid of delay ranges, inclusive of both endpoints.
struct RangeGrid {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 20;

  std::vector<double> values() const;  // throws on min <= 0, max < min, points < 2
  nlohmann::json to_json() const;
  static RangeGrid from_json(const nlohmann::json& j);
  static RangeGrid for_window(std::size_t window);  // N/2 .. 5N, 20 points
};

struct RangeCurves {
  std::vector<double> ranges;
  std::vector<double> precision;
  std::vector<double> recall;
};

RangeCurves range_curves(const std::vector<std::size_t>& true_drifts,
                         const std::vector<std::size_t>& detected,
                         const RangeGrid& grid);

// Trapezoidal area under (xs, ys) divided by (xs.back() - xs.front()), so a
// constant curve of value v scores v regardless of the grid. xs must be
// strictly increasing with at least two points.
double nauc(const std::vector<double>& xs, const std::vector<double>& ys);

// Fraction of predictions (made before any model update on the item) that
// match the true labels. Both vectors must have equal, nonzero length.
double prequential_accuracy(const std::vector<int>& predictions,
                            const std::vector<int>& truth);

// Flat per-run scoring record: counts at a reference delay range, the full
// precision/recall curves, their normalized areas, prequential accuracy, and
// the share of stream labels the detector consumed.
struct DetectionReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double reference_range = 0.0;
  double mean_delay = 0.0;  // NaN serialized as null when no TPs
  RangeCurves curves;
  double nauc_precision = 0.0;
  double nauc_recall = 0.0;
  double accuracy = 0.0;
  double label_fraction = 0.0;

  nlohmann::json to_json() const;
  // Plot-ready CSV: header "range,precision,recall", one row per grid point.
  std::string curve_csv() const;
};

// Builds the full report for one run. reference_range picks which grid-point
// style matching populates tp/fp/fn (it need not lie on the grid).
DetectionReport score_run(const std::vector<std::size_t>& true_drifts,
                          const std::vector<std::size_t>& detected,
                          const RangeGrid& grid,
                          double reference_range,
                          const std::vector<int>& predictions,
                          const std::vector<int>& truth,
                          double label_fraction);

}  // namespace drift

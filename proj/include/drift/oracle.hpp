#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "drift/types.hpp"

namespace drift {

/// Streams features freely but meters label access: labels become visible
/// only through explicit range requests, each revealed index is charged
/// exactly once no matter how often it is re-requested, and requests may
/// look ahead at most `lookahead` items past the streaming cursor (the
/// request window a confirming detector needs). Ground truth stays available
/// out-of-band for post-hoc scoring.
class MeteredStream {
 public:
  MeteredStream(std::vector<Sample> items, std::size_t lookahead);

  /// Yields (index, features) for the next item, or nullopt at end of stream.
  std::optional<std::pair<std::size_t, std::span<const double>>> next();

  /// Reveals labels for [begin, end) and returns those samples with labels.
  /// Idempotent for metering. Throws std::out_of_range when the range is
  /// empty/reversed, extends past the stream, or looks further ahead than
  /// consumed() + lookahead.
  LabeledWindow request_labels(std::size_t begin, std::size_t end);

  /// True when request_labels(begin, end) would be accepted.
  bool can_request(std::size_t begin, std::size_t end) const;

  /// Number of distinct labels revealed so far.
  std::size_t labels_used() const { return labels_used_; }

  /// labels_used() / size(); 0 for an empty stream.
  double label_fraction() const;

  /// Number of items already yielded by next().
  std::size_t consumed() const { return cursor_; }

  std::size_t size() const { return items_.size(); }
  std::size_t dim() const { return items_.empty() ? 0 : items_.front().x.size(); }
  std::size_t lookahead() const { return lookahead_; }

  /// Full ground truth for post-hoc evaluation only; detectors must obtain
  /// labels through request_labels so the meter stays honest.
  const std::vector<Sample>& underlying() const { return items_; }

 private:
  std::vector<Sample> items_;
  std::vector<char> revealed_;
  std::size_t labels_used_ = 0;
  std::size_t cursor_ = 0;
  std::size_t lookahead_;
};

}  // namespace drift

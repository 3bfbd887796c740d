#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace drift {

/// One stream item: a feature vector and an integer class label in [0, K).
/// Unlabeled contexts leave y at -1.
struct Sample {
  std::vector<double> x;
  int y = -1;
};

/// Per-item detector verdict. PotentialDrift is a Layer-I alarm awaiting
/// confirmation (or a baseline warning); ConfirmedDrift is final.
enum class DetectorStatus { Stable, PotentialDrift, ConfirmedDrift };

inline const char* to_string(DetectorStatus s) {
  switch (s) {
    case DetectorStatus::Stable: return "stable";
    case DetectorStatus::PotentialDrift: return "potential";
    case DetectorStatus::ConfirmedDrift: return "confirmed";
  }
  return "unknown";
}

/// A contiguous batch of labeled samples with a uniform feature dimension.
/// Dimension mismatches are rejected at insertion time so downstream code
/// can rely on rectangular data.
class LabeledWindow {
 public:
  LabeledWindow() = default;

  explicit LabeledWindow(std::vector<Sample> samples) {
    for (auto& s : samples) push_back(std::move(s));
  }

  void push_back(Sample s) {
    if (items_.empty()) {
      dim_ = s.x.size();
    } else if (s.x.size() != dim_) {
      throw std::invalid_argument("LabeledWindow: feature dimension mismatch (" +
                                  std::to_string(s.x.size()) + " vs " + std::to_string(dim_) + ")");
    }
    items_.push_back(std::move(s));
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t dim() const { return dim_; }

  const Sample& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Sample>& items() const { return items_; }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  /// Smallest K such that every label lies in [0, K). Throws on negative labels.
  std::size_t num_classes() const {
    int max_label = -1;
    for (const auto& s : items_) {
      if (s.y < 0) throw std::invalid_argument("LabeledWindow: negative label");
      if (s.y > max_label) max_label = s.y;
    }
    return static_cast<std::size_t>(max_label + 1);
  }

  /// True when every sample carries the same label (or the window is empty);
  /// such windows are untestable for split-based loss comparisons.
  bool single_class() const {
    for (const auto& s : items_) {
      if (s.y != items_.front().y) return false;
    }
    return true;
  }

 private:
  std::vector<Sample> items_;
  std::size_t dim_ = 0;
};

}  // namespace drift

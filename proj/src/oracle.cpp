#include "drift/oracle.hpp"

#include <stdexcept>
#include <string>

namespace drift {

MeteredStream::MeteredStream(std::vector<Sample> items, std::size_t lookahead)
    : items_(std::move(items)), revealed_(items_.size(), 0), lookahead_(lookahead) {
  for (const auto& s : items_) {
    if (s.x.size() != items_.front().x.size()) {
      throw std::invalid_argument("MeteredStream: feature dimension mismatch");
    }
  }
}

std::optional<std::pair<std::size_t, std::span<const double>>> MeteredStream::next() {
  if (cursor_ >= items_.size()) return std::nullopt;
  const std::size_t t = cursor_++;
  return std::make_pair(t, std::span<const double>(items_[t].x));
}

bool MeteredStream::can_request(std::size_t begin, std::size_t end) const {
  return begin < end && end <= items_.size() && end <= cursor_ + lookahead_;
}

LabeledWindow MeteredStream::request_labels(std::size_t begin, std::size_t end) {
  if (begin >= end) {
    throw std::out_of_range("request_labels: empty or reversed range [" + std::to_string(begin) +
                            ", " + std::to_string(end) + ")");
  }
  if (end > items_.size()) {
    throw std::out_of_range("request_labels: range [" + std::to_string(begin) + ", " +
                            std::to_string(end) + ") exceeds stream length " +
                            std::to_string(items_.size()));
  }
  if (end > cursor_ + lookahead_) {
    throw std::out_of_range("request_labels: range [" + std::to_string(begin) + ", " +
                            std::to_string(end) + ") looks ahead past item " +
                            std::to_string(cursor_ + lookahead_));
  }
  LabeledWindow window;
  for (std::size_t i = begin; i < end; ++i) {
    if (!revealed_[i]) {
      revealed_[i] = 1;
      ++labels_used_;
    }
    window.push_back(items_[i]);
  }
  return window;
}

double MeteredStream::label_fraction() const {
  if (items_.empty()) return 0.0;
  return static_cast<double>(labels_used_) / static_cast<double>(items_.size());
}

}  // namespace drift

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drift/types.hpp"

namespace drift {

enum class StreamKind {
  /// Gaussian class clusters whose centers take an abrupt common jump at
  /// each segment boundary: both the feature marginals and the error rate of
  /// a frozen classifier change (real + virtual drift).
  MovingGaussians,
  /// Fixed Gaussian clusters with the cluster-to-label assignment rotated at
  /// each boundary: P(X) is identical across segments, only P(y|X) moves, so
  /// purely feature-based monitors have nothing to see.
  LabelRotation,
  /// Single segment of the MovingGaussians concept; no drift at all.
  Stationary,
};

std::string to_string(StreamKind kind);
StreamKind stream_kind_from_string(const std::string& name);

struct StreamSpec {
  StreamKind kind = StreamKind::MovingGaussians;
  std::size_t length = 5000;
  std::size_t segments = 5;  // ignored by Stationary (forced to 1)
  std::size_t dim = 2;
  std::size_t classes = 2;
  double noise = 1.0;       // within-cluster standard deviation, per axis
  double jump = 2.0;        // boundary translation magnitude, in noise units
  double separation = 3.0;  // cluster spacing / placement radius, in noise units
  std::uint64_t seed = 1;

  /// Segment boundaries: floor(length * j / segments) for j = 1..segments-1;
  /// empty for Stationary.
  std::vector<std::size_t> true_drifts() const;

  void validate() const;
  nlohmann::json to_json() const;
  static StreamSpec from_json(const nlohmann::json& j);
};

struct GeneratedStream {
  StreamSpec spec;
  std::vector<Sample> items;
  std::vector<std::size_t> true_drifts;
};

/// Deterministic for a given (spec, spec.seed): same platform-independent
/// byte-for-byte sample values on every call.
GeneratedStream generate(const StreamSpec& spec);

/// CSV with dim feature columns followed by the integer label column; a
/// header row is written on save and skipped on load when present.
void save_csv(const GeneratedStream& stream, const std::string& path);

/// Loads samples from CSV. The label column defaults to the last column.
/// Rows that fail to parse raise std::runtime_error naming the line. An
/// empty file (or header only) yields an empty stream.
std::vector<Sample> load_csv(const std::string& path,
                             std::optional<std::size_t> label_column = std::nullopt);

/// Sidecar metadata written next to generated CSVs.
nlohmann::json manifest_json(const GeneratedStream& stream);

}  // namespace drift

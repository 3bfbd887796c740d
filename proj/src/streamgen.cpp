#include "drift/streamgen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "drift/rng.hpp"

namespace drift {

std::string to_string(StreamKind kind) {
  switch (kind) {
    case StreamKind::MovingGaussians: return "moving_gaussians";
    case StreamKind::LabelRotation: return "label_rotation";
    case StreamKind::Stationary: return "stationary";
  }
  throw std::invalid_argument("to_string: unknown stream kind");
}

StreamKind stream_kind_from_string(const std::string& name) {
  if (name == "moving_gaussians") return StreamKind::MovingGaussians;
  if (name == "label_rotation") return StreamKind::LabelRotation;
  if (name == "stationary") return StreamKind::Stationary;
  throw std::invalid_argument("unknown stream kind: " + name);
}

void StreamSpec::validate() const {
  if (length == 0) throw std::invalid_argument("StreamSpec: length must be positive");
  if (segments == 0) throw std::invalid_argument("StreamSpec: segments must be positive");
  if (dim == 0) throw std::invalid_argument("StreamSpec: dim must be positive");
  if (classes < 2) throw std::invalid_argument("StreamSpec: need at least two classes");
  if (!(noise > 0.0)) throw std::invalid_argument("StreamSpec: noise must be positive");
  if (jump < 0.0) throw std::invalid_argument("StreamSpec: jump must be non-negative");
  if (!(separation > 0.0)) throw std::invalid_argument("StreamSpec: separation must be positive");
  if (kind == StreamKind::LabelRotation && dim < 2) {
    throw std::invalid_argument("StreamSpec: label_rotation needs dim >= 2");
  }
}

std::vector<std::size_t> StreamSpec::true_drifts() const {
  std::vector<std::size_t> drifts;
  if (kind == StreamKind::Stationary) return drifts;
  for (std::size_t j = 1; j < segments; ++j) {
    drifts.push_back(length * j / segments);
  }
  return drifts;
}

namespace {

std::size_t segment_of(std::size_t t, const std::vector<std::size_t>& boundaries) {
  std::size_t s = 0;
  while (s < boundaries.size() && t >= boundaries[s]) ++s;
  return s;
}

GeneratedStream generate_moving(const StreamSpec& spec, bool stationary) {
  GeneratedStream out;
  out.spec = spec;
  out.spec.kind = stationary ? StreamKind::Stationary : StreamKind::MovingGaussians;
  if (stationary) out.spec.segments = 1;
  out.true_drifts = out.spec.true_drifts();

  const std::size_t segments = out.spec.segments;
  const std::size_t d = spec.dim;
  const std::size_t k = spec.classes;

  // Class centers sit along the last axis at `separation` spacing, centered
  // on the origin.
  std::vector<std::vector<double>> centers(k, std::vector<double>(d, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    centers[c][d - 1] =
        (static_cast<double>(c) - (static_cast<double>(k) - 1.0) / 2.0) * spec.separation * spec.noise;
  }

  // At each boundary every class center takes the same translation: each
  // axis moves by jump * noise / sqrt(d) with an independent random sign, so
  // the jump vector has norm exactly jump * noise and every attribute's
  // marginal shifts by the same magnitude.
  Rng rng(derive_seed(spec.seed, 0x6d6f7665));
  const double component = spec.jump * spec.noise / std::sqrt(static_cast<double>(d));
  std::vector<std::vector<double>> offsets(segments, std::vector<double>(d, 0.0));
  for (std::size_t s = 1; s < segments; ++s) {
    for (std::size_t j = 0; j < d; ++j) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      offsets[s][j] = offsets[s - 1][j] + sign * component;
    }
  }

  out.items.resize(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t) {
    const std::size_t s = segment_of(t, out.true_drifts);
    const std::size_t label = rng.index(k);
    Sample& item = out.items[t];
    item.y = static_cast<int>(label);
    item.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      item.x[j] = centers[label][j] + offsets[s][j] + spec.noise * rng.normal();
    }
  }
  return out;
}

GeneratedStream generate_rotation(const StreamSpec& spec) {
  GeneratedStream out;
  out.spec = spec;
  out.true_drifts = spec.true_drifts();

  const std::size_t d = spec.dim;
  const std::size_t k = spec.classes;

  // Fixed clusters on a circle in the first two axes; the feature process
  // never changes, only the cluster -> label map rotates per segment.
  std::vector<std::vector<double>> centers(k, std::vector<double>(d, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(k);
    centers[c][0] = spec.separation * spec.noise * std::cos(angle);
    centers[c][1] = spec.separation * spec.noise * std::sin(angle);
  }

  Rng rng(derive_seed(spec.seed, 0x726f7461));
  out.items.resize(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t) {
    const std::size_t s = segment_of(t, out.true_drifts);
    const std::size_t cluster = rng.index(k);
    Sample& item = out.items[t];
    item.y = static_cast<int>((cluster + s) % k);
    item.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      item.x[j] = centers[cluster][j] + spec.noise * rng.normal();
    }
  }
  return out;
}

}  // namespace

GeneratedStream generate(const StreamSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case StreamKind::MovingGaussians: return generate_moving(spec, false);
    case StreamKind::Stationary: return generate_moving(spec, true);
    case StreamKind::LabelRotation: return generate_rotation(spec);
  }
  throw std::invalid_argument("generate: unknown stream kind");
}

nlohmann::json StreamSpec::to_json() const {
  return nlohmann::json{{"kind", to_string(kind)},
                        {"length", length},
                        {"segments", segments},
                        {"dim", dim},
                        {"classes", classes},
                        {"noise", noise},
                        {"jump", jump},
                        {"separation", separation},
                        {"seed", seed}};
}

StreamSpec StreamSpec::from_json(const nlohmann::json& j) {
  StreamSpec spec;
  spec.kind = stream_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("length")) spec.length = j.at("length").get<std::size_t>();
  if (j.contains("segments")) spec.segments = j.at("segments").get<std::size_t>();
  if (j.contains("dim")) spec.dim = j.at("dim").get<std::size_t>();
  if (j.contains("classes")) spec.classes = j.at("classes").get<std::size_t>();
  if (j.contains("noise")) spec.noise = j.at("noise").get<double>();
  if (j.contains("jump")) spec.jump = j.at("jump").get<double>();
  if (j.contains("separation")) spec.separation = j.at("separation").get<double>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

nlohmann::json manifest_json(const GeneratedStream& stream) {
  nlohmann::json j = stream.spec.to_json();
  j["true_drifts"] = stream.true_drifts;
  return j;
}

void save_csv(const GeneratedStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  out.precision(17);
  for (std::size_t j = 0; j < stream.spec.dim; ++j) out << 'f' << j << ',';
  out << "label\n";
  for (const auto& item : stream.items) {
    for (double v : item.x) out << v << ',';
    out << item.y << '\n';
  }
  if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

std::vector<Sample> load_csv(const std::string& path, std::optional<std::size_t> label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::vector<Sample> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");

    // A first row that does not parse as numbers is a header.
    if (line_no == 1) {
      try {
        std::size_t pos = 0;
        (void)std::stod(fields.at(0), &pos);
        if (pos != fields.at(0).size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        continue;
      }
    }

    if (fields.size() < 2) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": need at least one feature and a label");
    }
    const std::size_t label_idx = label_column.value_or(fields.size() - 1);
    if (label_idx >= fields.size()) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": label column " + std::to_string(label_idx) + " out of range");
    }

    Sample s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::size_t pos = 0;
      double value = 0.0;
      try {
        value = std::stod(fields[i], &pos);
      } catch (const std::exception&) {
        throw std::runtime_error("load_csv: line " + std::to_string(line_no) + ": field " +
                                 std::to_string(i) + " ('" + fields[i] + "') is not numeric");
      }
      if (pos != fields[i].size()) {
        throw std::runtime_error("load_csv: line " + std::to_string(line_no) + ": field " +
                                 std::to_string(i) + " ('" + fields[i] + "') is not numeric");
      }
      if (i == label_idx) {
        const long rounded = std::lround(value);
        if (std::fabs(value - static_cast<double>(rounded)) > 1e-9 || rounded < 0) {
          throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                   ": label '" + fields[i] + "' is not a non-negative integer");
        }
        s.y = static_cast<int>(rounded);
      } else {
        s.x.push_back(value);
      }
    }
    if (!items.empty() && s.x.size() != items.front().x.size()) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": inconsistent feature count");
    }
    items.push_back(std::move(s));
  }
  return items;
}

}  // namespace drift

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "drift/experiment.hpp"
#include "drift/streamgen.hpp"

namespace fs = std::filesystem;

using drift::DetectorKind;
using drift::DetectorSpec;
using drift::ExperimentConfig;
using drift::GeneratedStream;
using drift::RunResult;
using drift::StreamEntry;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("drift-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

nlohmann::json small_config_json() {
  return nlohmann::json{
      {"window", 40},
      {"reference_range", 150.0},
      {"workers", 3},
      {"seed_count", 2},
      {"streams",
       nlohmann::json::array({{{"kind", "moving_gaussians"},
                               {"name", "moving"},
                               {"length", 800},
                               {"segments", 2},
                               {"dim", 2},
                               {"classes", 2},
                               {"seed", 5}}})},
      {"detectors", nlohmann::json::array({
                        {{"kind", "hht_cu"}, {"theta2", 0.05}, {"permutations", 99}},
                        {{"kind", "aks"}},
                        {{"kind", "ddm"}},
                    })}};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Relative paths of every regular file under root, sorted.
std::vector<std::string> file_listing(const fs::path& root) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files.push_back(fs::relative(entry.path(), root).string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(DRIFT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(command.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("detector kind names round-trip and reject unknowns") {
  for (DetectorKind kind : {DetectorKind::HhtCu, DetectorKind::HhtAg, DetectorKind::AttributeKs,
                            DetectorKind::Ddm, DetectorKind::Eddm, DetectorKind::Hddm}) {
    CHECK(drift::detector_kind_from_string(drift::to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(drift::detector_kind_from_string("kswin"), std::invalid_argument);
}

TEST_CASE("experiment config parsing") {
  const nlohmann::json base = small_config_json();
  const ExperimentConfig config = ExperimentConfig::from_json(base);
  CHECK(config.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(config.window == 40);
  CHECK(config.detectors.size() == 3);
  CHECK(config.detectors[0].name == "hht_cu");  // defaults to the kind
  CHECK(config.streams[0].name == "moving");
  CHECK(config.harness().grid.values().front() == doctest::Approx(20.0));

  SUBCASE("seeds and seed_count are mutually exclusive") {
    nlohmann::json j = base;
    j["seeds"] = {7, 8};
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
    j.erase("seed_count");
    CHECK_NOTHROW(ExperimentConfig::from_json(j));
    j.erase("seeds");
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
  }

  SUBCASE("unknown detector parameters are rejected at load time") {
    nlohmann::json j = base;
    j["detectors"][2]["threshold"] = 0.5;  // ddm has no such knob
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("threshold"),
                         std::invalid_argument);
  }

  SUBCASE("invalid detector values are rejected at load time") {
    nlohmann::json j = base;
    j["detectors"][0]["theta1"] = 1.5;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
  }

  SUBCASE("unknown kinds are rejected") {
    nlohmann::json j = base;
    j["detectors"][1]["kind"] = "page_hinkley";
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
  }

  SUBCASE("duplicate names collide") {
    nlohmann::json j = base;
    j["detectors"][1]["name"] = "hht_cu";
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);

    j = base;
    j["streams"].push_back(j["streams"][0]);
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
  }

  SUBCASE("names are path-safe") {
    nlohmann::json j = base;
    j["detectors"][0]["name"] = "../evil";
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
  }

  SUBCASE("degenerate window rejected") {
    nlohmann::json j = base;
    j["window"] = 1;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
  }
}

TEST_CASE("stream materialization") {
  StreamEntry entry;
  drift::StreamSpec spec;
  spec.kind = drift::StreamKind::MovingGaussians;
  spec.length = 200;
  spec.segments = 2;
  spec.seed = 9;
  entry.spec = spec;
  entry.name = "moving";

  const GeneratedStream a = drift::materialize(entry, 1);
  const GeneratedStream b = drift::materialize(entry, 1);
  const GeneratedStream c = drift::materialize(entry, 2);
  CHECK(a.items.size() == 200);
  CHECK(a.items[17].x == b.items[17].x);         // same run seed: identical
  CHECK_FALSE(a.items[17].x == c.items[17].x);   // different run seed: fresh draw
  CHECK(a.true_drifts == std::vector<std::size_t>{100});

  SUBCASE("CSV streams carry external truth and class counts") {
    TempDir dir("csv");
    const fs::path csv = dir.path / "ext.csv";
    {
      std::ofstream out(csv);
      out << "f0,f1,label\n";
      for (int i = 0; i < 50; ++i) out << i << "," << -i << "," << i % 2 << "\n";
    }
    StreamEntry external;
    external.csv_path = csv.string();
    external.name = "ext";
    external.true_drifts = {25};
    const GeneratedStream loaded = drift::materialize(external, 1);
    CHECK(loaded.items.size() == 50);
    CHECK(loaded.spec.classes == 2);
    CHECK(loaded.spec.dim == 2);
    CHECK(loaded.true_drifts == std::vector<std::size_t>{25});

    external.classes = 2;
    CHECK_NOTHROW(drift::materialize(external, 1));
    external.classes = 1;  // labels 0/1 exceed a single declared class
    CHECK_THROWS_AS(drift::materialize(external, 1), std::runtime_error);
  }
}

TEST_CASE("single-run harness accounting") {
  const ExperimentConfig config = ExperimentConfig::from_json(small_config_json());
  const GeneratedStream stream = drift::materialize(config.streams[0], 1);
  const auto harness = config.harness();

  SUBCASE("supervised monitors consume every label") {
    const RunResult run = drift::run_detector(stream, config.detectors[2], harness, 11);
    CHECK(run.report.label_fraction == 1.0);  // exact: initial window + one per item
    CHECK(run.events.size() == stream.items.size() - harness.window);
    CHECK(run.report.accuracy > 0.5);
  }

  SUBCASE("sliding-window detectors only pay for adjudications") {
    const RunResult run = drift::run_detector(stream, config.detectors[1], harness, 11);
    CHECK(run.report.label_fraction < 1.0);
    CHECK(run.report.label_fraction >=
          static_cast<double>(harness.window) / static_cast<double>(stream.items.size()));
    for (std::size_t c : run.confirmed) {
      CHECK(std::find(run.potential.begin(), run.potential.end(), c) != run.potential.end());
    }
  }

  SUBCASE("degenerate streams are rejected") {
    drift::StreamSpec tiny;
    tiny.length = 80;  // == 2 * window: no room to stream
    tiny.segments = 1;
    tiny.kind = drift::StreamKind::Stationary;
    GeneratedStream short_stream = drift::generate(tiny);
    CHECK_THROWS_AS(drift::run_detector(short_stream, config.detectors[2], harness, 1),
                    std::runtime_error);

    GeneratedStream one_class = stream;
    one_class.spec.classes = 1;
    CHECK_THROWS_AS(drift::run_detector(one_class, config.detectors[2], harness, 1),
                    std::runtime_error);
  }
}

TEST_CASE("matrix runs are deterministic across invocations and worker counts") {
  ExperimentConfig config = ExperimentConfig::from_json(small_config_json());

  TempDir dir_a("matrix-a");
  TempDir dir_b("matrix-b");

  const std::vector<RunResult> first = drift::run_matrix(config, dir_a.str());
  CHECK(first.size() == 1 * 2 * 3);  // streams x seeds x detectors

  config.workers = 1;  // same work, serial
  const std::vector<RunResult> second = drift::run_matrix(config, dir_b.str());
  REQUIRE(second.size() == first.size());

  const auto files_a = file_listing(dir_a.path);
  const auto files_b = file_listing(dir_b.path);
  REQUIRE_FALSE(files_a.empty());
  REQUIRE(files_a == files_b);
  for (const std::string& rel : files_a) {
    CHECK_MESSAGE(slurp(dir_a.path / rel) == slurp(dir_b.path / rel), "file differs: ", rel);
  }

  // Layout: out/<stream>/<detector>/seed-<seed>/report.json
  CHECK(fs::exists(dir_a.path / "moving" / "hht_cu" / "seed-1" / "report.json"));
  CHECK(fs::exists(dir_a.path / "moving" / "aks" / "seed-2" / "curve.csv"));
  CHECK(fs::exists(dir_a.path / "moving" / "ddm" / "seed-1" / "events.jsonl"));

  const nlohmann::json report =
      nlohmann::json::parse(slurp(dir_a.path / "moving" / "ddm" / "seed-1" / "report.json"));
  CHECK(report.at("stream") == "moving");
  CHECK(report.at("detector") == "ddm");
  CHECK(report.at("seed") == 1);
  CHECK(report.at("label_fraction") == 1.0);
  CHECK(report.contains("confirmed"));
  CHECK(report.at("curve").size() == 20);

  // Aggregation groups by (stream, detector) and averages across seeds.
  const nlohmann::json aggregate = drift::evaluate_directory(dir_a.str());
  REQUIRE(aggregate.at("groups").size() == 3);
  for (const auto& row : aggregate.at("groups")) {
    CHECK(row.at("runs") == 2);
    CHECK(row.at("stream") == "moving");
  }

  SUBCASE("event logs can be switched off") {
    TempDir dir_c("matrix-c");
    config.write_events = false;
    drift::run_matrix(config, dir_c.str());
    CHECK(fs::exists(dir_c.path / "moving" / "ddm" / "seed-1" / "report.json"));
    CHECK_FALSE(fs::exists(dir_c.path / "moving" / "ddm" / "seed-1" / "events.jsonl"));
  }
}

TEST_CASE("command-line interface") {
  TempDir dir("cli");
  const fs::path config_path = dir.path / "config.json";
  nlohmann::json j = small_config_json();
  j["seed_count"] = 1;
  j["detectors"] = nlohmann::json::array({{{"kind", "ddm"}}, {{"kind", "aks"}}});
  j["out"] = (dir.path / "runs").string();
  {
    std::ofstream out(config_path);
    out << j.dump(2);
  }

  SUBCASE("run then evaluate round-trips") {
    CHECK(run_cli("run --config " + config_path.string()) == 0);
    CHECK(fs::exists(dir.path / "runs" / "moving" / "ddm" / "seed-1" / "report.json"));
    CHECK(run_cli("evaluate --out " + (dir.path / "runs").string()) == 0);
    CHECK(fs::exists(dir.path / "runs" / "aggregate.json"));
    const nlohmann::json aggregate =
        nlohmann::json::parse(slurp(dir.path / "runs" / "aggregate.json"));
    CHECK(aggregate.at("groups").size() == 2);
  }

  SUBCASE("generate is byte-deterministic") {
    const fs::path gen_a = dir.path / "gen-a";
    const fs::path gen_b = dir.path / "gen-b";
    CHECK(run_cli("generate --config " + config_path.string() + " --out " + gen_a.string()) == 0);
    CHECK(run_cli("generate --config " + config_path.string() + " --out " + gen_b.string()) == 0);
    const fs::path rel = fs::path("streams") / "moving-seed-1.csv";
    REQUIRE(fs::exists(gen_a / rel));
    CHECK(slurp(gen_a / rel) == slurp(gen_b / rel));
    CHECK(fs::exists(gen_a / "streams" / "moving-seed-1.manifest.json"));
  }

  SUBCASE("usage errors exit with 1") {
    CHECK(run_cli("") == 1);                         // missing subcommand
    CHECK(run_cli("frobnicate") == 1);               // unknown subcommand
    CHECK(run_cli("run") == 1);                      // missing --config
    CHECK(run_cli("run --config /no/such/file.json") == 1);
    CHECK(run_cli("evaluate") == 1);                 // no directory given

    const fs::path broken = dir.path / "broken.json";
    {
      std::ofstream out(broken);
      out << "{\"window\": 1}";
    }
    CHECK(run_cli("run --config " + broken.string()) == 1);
  }

  SUBCASE("runtime failures exit with 2") {
    CHECK(run_cli("evaluate --out " + (dir.path / "missing").string()) == 2);
  }
}

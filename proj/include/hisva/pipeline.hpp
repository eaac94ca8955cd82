#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "hisva/clickstream.hpp"
#include "hisva/corpus.hpp"
#include "hisva/events.hpp"
#include "hisva/index.hpp"
#include "hisva/relevance.hpp"

namespace hisva {

namespace fs = std::filesystem;

/// Declarative pipeline configuration (JSON). Relative paths resolve against
/// the directory holding the config file.
struct Config {
  fs::path articles;
  fs::path gazetteer;
  fs::path clickstream;
  fs::path work_dir = "work";
  fs::path notes;  // defaults to <work_dir>/notes.jsonl
  std::set<std::string> seeds;

  SelectionOptions selection;
  unsigned extract_threads = 1;

  struct Topics {
    int k_min = 10;
    int k_max = 50;
    int k_step = 10;
    std::vector<std::uint64_t> seeds{1};
    std::optional<double> alpha;
    double beta = 0.01;
    int iterations = 1000;
    std::size_t coherence_window = 110;
    unsigned threads = 1;
  } topics;

  PageRankOptions ranking;

  ClusterOptions clusters;
  std::optional<double> merge_window_years;
  TopicAssignment assignment;

  std::string host = "127.0.0.1";
  int port = 8080;

  static Config load(const fs::path& path);
  static Config from_json_text(const std::string& text, const fs::path& base_dir);

  fs::path selection_path() const { return work_dir / "selection.json"; }
  fs::path events_path() const { return work_dir / "events.json"; }
  fs::path model_path() const { return work_dir / "topic_model.json"; }
  fs::path ranking_path() const { return work_dir / "ranking.json"; }
  fs::path index_path() const { return work_dir / "index.json"; }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kArtifactVersion = 1;

struct StageReport {
  std::string summary;
  std::vector<std::string> warnings;
};

struct ModelOverrides {
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<std::uint64_t> seed;
};

StageReport run_ingest(const Config& cfg);
StageReport run_extract(const Config& cfg);
StageReport run_model(const Config& cfg, const ModelOverrides& overrides = {});
StageReport run_rank(const Config& cfg);
StageReport run_index(const Config& cfg);

using ClickEdge = std::tuple<std::string, std::string, std::uint64_t>;

/// Everything the query service needs, persisted as one versioned file.
struct IndexData {
  int num_topics = 0;
  std::vector<std::vector<std::string>> keywords;
  std::optional<double> coherence;
  std::vector<IndexedEvent> events;  // sorted by id, unanchored included
  std::map<std::string, std::string> texts;
  std::map<std::string, std::map<DateValue, Tally>> date_counts;
  std::map<std::string, std::map<std::string, Tally>> location_counts;
  ImportanceScores scores;
  std::vector<ClickEdge> edges;
  ClusterOptions clusters;
  std::optional<double> merge_window_years;
  TopicAssignment assignment;
};

void save_index(const IndexData& data, const fs::path& path);
/// Throws IndexLoadError for a missing, corrupt or version-incompatible file.
IndexData load_index(const fs::path& path);

}  // namespace hisva

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hisva {

struct Transition {
  std::size_t target = 0;  // node index
  std::uint64_t count = 0;
};

/// Directed graph of reader transitions between articles. Nodes are kept in
/// id order; self-loops are dropped and parallel edges merged by summing.
class ClickstreamGraph {
 public:
  ClickstreamGraph() = default;
  explicit ClickstreamGraph(const std::set<std::string>& nodes);

  /// Ignores self-loops and edges touching unknown nodes; returns whether the
  /// edge was kept. Throws std::invalid_argument for count 0.
  bool add_edge(const std::string& source, const std::string& target, std::uint64_t count);

  std::size_t num_nodes() const { return ids_.size(); }
  std::size_t num_edges() const;
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> node(const std::string& id) const;
  /// Outgoing transitions of a node, ordered by target index.
  std::vector<Transition> out_edges(std::size_t node) const;
  std::uint64_t out_weight(std::size_t node) const;
  std::uint64_t count(const std::string& source, const std::string& target) const;

 private:
  std::vector<std::string> ids_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::map<std::size_t, std::uint64_t>> out_;
};

struct ClickstreamLoad {
  ClickstreamGraph graph;
  std::size_t kept = 0;
  std::size_t dropped = 0;  // self-loops or endpoints outside the node set
  std::vector<std::string> warnings;
};

class ClickstreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tab-separated `source_id, target_id, count`. Malformed lines and
/// non-positive counts are skipped with a warning.
ClickstreamLoad parse_clickstream(std::string_view tsv, const std::set<std::string>& nodes);
ClickstreamLoad load_clickstream(const std::filesystem::path& path, const std::set<std::string>& nodes);

struct PageRankOptions {
  double damping = 0.85;
  double epsilon = 1e-10;
  int max_iterations = 200;
};

struct PageRankResult {
  std::map<std::string, double> scores;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on transition-count-weighted out-links with uniform
/// teleport; dangling mass is spread uniformly. Stops when the L1 change is
/// below epsilon; hitting max_iterations returns with converged = false.
/// Throws std::invalid_argument on an empty graph.
PageRankResult pagerank(const ClickstreamGraph& graph, const PageRankOptions& opts = {});

}  // namespace hisva

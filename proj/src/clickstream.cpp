#include "hisva/clickstream.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hisva {

ClickstreamGraph::ClickstreamGraph(const std::set<std::string>& nodes)
    : ids_(nodes.begin(), nodes.end()), out_(nodes.size()) {
  for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
}

std::optional<std::size_t> ClickstreamGraph::node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool ClickstreamGraph::add_edge(const std::string& source, const std::string& target,
                                std::uint64_t count) {
  if (count == 0) throw std::invalid_argument("transition count must be positive");
  auto s = node(source);
  auto t = node(target);
  if (!s || !t || *s == *t) return false;
  out_[*s][*t] += count;
  return true;
}

std::size_t ClickstreamGraph::num_edges() const {
  std::size_t n = 0;
  for (const auto& m : out_) n += m.size();
  return n;
}

std::vector<Transition> ClickstreamGraph::out_edges(std::size_t n) const {
  std::vector<Transition> out;
  out.reserve(out_.at(n).size());
  for (const auto& [t, c] : out_[n]) out.push_back({t, c});
  return out;
}

std::uint64_t ClickstreamGraph::out_weight(std::size_t n) const {
  std::uint64_t w = 0;
  for (const auto& [t, c] : out_.at(n)) w += c;
  return w;
}

std::uint64_t ClickstreamGraph::count(const std::string& source, const std::string& target) const {
  auto s = node(source);
  auto t = node(target);
  if (!s || !t) return 0;
  auto it = out_[*s].find(*t);
  return it == out_[*s].end() ? 0 : it->second;
}

ClickstreamLoad parse_clickstream(std::string_view tsv, const std::set<std::string>& nodes) {
  ClickstreamLoad out{ClickstreamGraph(nodes), 0, 0, {}};
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < tsv.size()) {
    auto nl = tsv.find('\n', pos);
    auto line = tsv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? tsv.size() : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;

    auto t1 = line.find('\t');
    auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    auto warn = [&](const std::string& why) {
      out.warnings.push_back("clickstream line " + std::to_string(lineno) + ": " + why);
    };
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      warn("expected 3 tab-separated fields");
      continue;
    }
    auto count_str = line.substr(t2 + 1);
    std::uint64_t count = 0;
    auto [p, ec] = std::from_chars(count_str.data(), count_str.data() + count_str.size(), count);
    if (ec != std::errc() || p != count_str.data() + count_str.size() || count == 0) {
      warn("count is not a positive integer");
      continue;
    }
    std::string source(line.substr(0, t1));
    std::string target(line.substr(t1 + 1, t2 - t1 - 1));
    if (out.graph.add_edge(source, target, count)) {
      ++out.kept;
    } else {
      ++out.dropped;
    }
  }
  return out;
}

ClickstreamLoad load_clickstream(const std::filesystem::path& path, const std::set<std::string>& nodes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ClickstreamError("cannot open clickstream file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_clickstream(ss.str(), nodes);
}

PageRankResult pagerank(const ClickstreamGraph& graph, const PageRankOptions& opts) {
  const std::size_t n = graph.num_nodes();
  if (n == 0) throw std::invalid_argument("pagerank of an empty graph");

  std::vector<std::vector<Transition>> out(n);
  std::vector<double> weight(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    out[u] = graph.out_edges(u);
    weight[u] = static_cast<double>(graph.out_weight(u));
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n);
  std::vector<double> next(n);
  PageRankResult result;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (out[u].empty()) dangling += rank[u];
    }
    const double base = (1.0 - opts.damping) * inv_n + opts.damping * dangling * inv_n;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t u = 0; u < n; ++u) {
      if (out[u].empty()) continue;
      const double share = opts.damping * rank[u] / weight[u];
      for (const auto& e : out[u]) next[e.target] += share * static_cast<double>(e.count);
    }
    double delta = 0.0;
    for (std::size_t u = 0; u < n; ++u) delta += std::abs(next[u] - rank[u]);
    rank.swap(next);
    result.iterations = iter;
    if (delta < opts.epsilon) {
      result.converged = true;
      break;
    }
  }
  // renormalize away accumulated rounding so the scores sum to 1
  double total = 0.0;
  for (double r : rank) total += r;
  for (std::size_t u = 0; u < n; ++u) result.scores.emplace(graph.ids()[u], rank[u] / total);
  return result;
}

}  // namespace hisva

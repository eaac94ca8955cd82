#include "hisva/relevance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace hisva {

std::string_view to_string(RecMode mode) {
  return mode == RecMode::Topic ? "TOPIC_REC" : "POPULAR_REC";
}

std::optional<RecMode> parse_rec_mode(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "topic" || lower == "topic_rec") return RecMode::Topic;
  if (lower == "popular" || lower == "popular_rec" || lower == "popularity") return RecMode::Popular;
  return std::nullopt;
}

std::optional<double> ImportanceScores::score(const std::string& id, RecMode mode) const {
  const auto& m = mode == RecMode::Topic ? topic_contribution : popularity;
  auto it = m.find(id);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, double> min_max_rescale(const std::map<std::string, double>& values) {
  std::map<std::string, double> out;
  if (values.empty()) return out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [id, v] : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  for (const auto& [id, v] : values) out.emplace(id, span > 0.0 ? (v - lo) / span : 0.0);
  return out;
}

ImportanceScores make_importance(std::map<std::string, double> pagerank,
                                 std::map<std::string, double> topic_contribution) {
  ImportanceScores s;
  s.popularity = min_max_rescale(pagerank);
  s.pagerank = std::move(pagerank);
  s.topic_contribution = std::move(topic_contribution);
  return s;
}

std::set<std::string> important_events(const std::vector<std::string>& events,
                                       const ImportanceScores& scores, RecMode mode,
                                       double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in [0, 1]");
  std::set<std::string> out;
  for (const auto& id : events) {
    auto s = scores.score(id, mode);
    if (s && passes_threshold(*s, threshold)) out.insert(id);
  }
  return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      sum += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

TfIdf::TfIdf(const Corpus& corpus) : vocab_(corpus.vocab) {
  const std::size_t V = vocab_.size();
  const double N = static_cast<double>(corpus.num_docs());
  std::vector<std::size_t> df(V, 0);
  std::vector<std::map<int, double>> counts(corpus.num_docs());
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    for (int w : corpus.docs[d]) counts[d][w] += 1.0;
    for (const auto& [w, c] : counts[d]) ++df[static_cast<std::size_t>(w)];
  }
  idf_.resize(V);
  for (std::size_t w = 0; w < V; ++w) idf_[w] = std::log((1.0 + N) / (1.0 + static_cast<double>(df[w]))) + 1.0;

  docs_.reserve(corpus.num_docs());
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    DocVector v{corpus.doc_ids[d], weigh(counts[d]), counts[d].empty()};
    by_id_.emplace(v.id, docs_.size());
    docs_.push_back(std::move(v));
  }
}

SparseVector TfIdf::weigh(const std::map<int, double>& counts) const {
  SparseVector v;
  double norm = 0.0;
  for (const auto& [w, c] : counts) {
    double x = c * idf_[static_cast<std::size_t>(w)];
    v.emplace_back(w, x);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& [w, x] : v) x /= norm;
  }
  return v;
}

SparseVector TfIdf::vectorize(const std::vector<std::string>& tokens) const {
  std::map<int, double> counts;
  for (const auto& t : tokens) {
    if (auto id = vocab_.index(t)) counts[*id] += 1.0;
  }
  return weigh(counts);
}

const DocVector* TfIdf::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

std::map<std::string, DocVector> embed_documents(const Corpus& corpus) {
  TfIdf tfidf(corpus);
  std::map<std::string, DocVector> out;
  for (const auto& d : tfidf.documents()) out.emplace(d.id, d);
  return out;
}

std::vector<Related> Recommender::related_articles(const std::string& id, RecMode mode,
                                                   std::size_t k) const {
  const DocVector* self = tfidf_.find(id);
  if (!self) throw UnknownArticle(id);

  std::vector<Related> out;
  if (mode == RecMode::Topic) {
    for (const auto& other : tfidf_.documents()) {
      if (other.id == id) continue;
      double s = std::min(1.0, dot(self->weights, other.weights));
      if (s > 0.0) out.push_back({other.id, s});
    }
  } else if (auto node = graph_.node(id)) {
    for (const auto& e : graph_.out_edges(*node)) {
      out.push_back({graph_.ids()[e.target], static_cast<double>(e.count)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Related& a, const Related& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace hisva

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hisva/clickstream.hpp"
#include "hisva/text.hpp"

namespace hisva {

/// TOPIC_REC ranks by topic contribution, POPULAR_REC by clickstream PageRank.
enum class RecMode { Topic, Popular };

std::string_view to_string(RecMode mode);
/// Accepts "topic"/"TOPIC_REC" and "popular"/"POPULAR_REC" (any case).
std::optional<RecMode> parse_rec_mode(std::string_view s);

class UnknownArticle : public std::out_of_range {
 public:
  explicit UnknownArticle(const std::string& id) : std::out_of_range("unknown article: " + id) {}
};

struct ImportanceScores {
  std::map<std::string, double> pagerank;
  /// PageRank min-max rescaled to [0, 1] over the corpus, so the shared
  /// threshold slider means the same thing in both modes.
  std::map<std::string, double> popularity;
  /// Largest topic weight of each article.
  std::map<std::string, double> topic_contribution;

  std::optional<double> score(const std::string& id, RecMode mode) const;
};

/// All-equal inputs rescale to 0.
std::map<std::string, double> min_max_rescale(const std::map<std::string, double>& values);

ImportanceScores make_importance(std::map<std::string, double> pagerank,
                                 std::map<std::string, double> topic_contribution);

/// Strictly above the threshold; a threshold of 0 admits everything.
inline bool passes_threshold(double score, double threshold) {
  return threshold <= 0.0 || score > threshold;
}

/// Ids among `events` whose score in `mode` passes `threshold`. Events with no
/// score in that mode are never important. Throws std::invalid_argument when
/// the threshold is outside [0, 1].
std::set<std::string> important_events(const std::vector<std::string>& events,
                                       const ImportanceScores& scores, RecMode mode,
                                       double threshold);

using SparseVector = std::vector<std::pair<int, double>>;  // sorted by term id

struct DocVector {
  std::string id;
  SparseVector weights;  // L2-normalized TF-IDF
  bool empty = false;
};

double dot(const SparseVector& a, const SparseVector& b);

/// TF-IDF over a corpus with raw term counts and smoothed idf
/// ln((1 + N) / (1 + df)) + 1. Empty documents get a zero vector.
class TfIdf {
 public:
  TfIdf() = default;
  explicit TfIdf(const Corpus& corpus);

  /// Normalized vector of arbitrary tokens; terms outside the vocabulary are
  /// ignored.
  SparseVector vectorize(const std::vector<std::string>& tokens) const;
  const std::vector<DocVector>& documents() const { return docs_; }
  const DocVector* find(const std::string& id) const;
  double idf(int term) const { return idf_.at(static_cast<std::size_t>(term)); }
  const Vocabulary& vocabulary() const { return vocab_; }

 private:
  SparseVector weigh(const std::map<int, double>& counts) const;

  Vocabulary vocab_;
  std::vector<double> idf_;
  std::vector<DocVector> docs_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

std::map<std::string, DocVector> embed_documents(const Corpus& corpus);

struct Related {
  std::string id;
  double score = 0.0;

  bool operator==(const Related&) const = default;
};

/// Related-article pop-up: cosine neighbours in TOPIC_REC mode, outgoing
/// clickstream transitions in POPULAR_REC mode.
class Recommender {
 public:
  Recommender(TfIdf tfidf, ClickstreamGraph graph)
      : tfidf_(std::move(tfidf)), graph_(std::move(graph)) {}

  /// Up to k articles, best first, ties by id. TOPIC_REC excludes the article
  /// itself and anything with zero similarity. Throws UnknownArticle.
  std::vector<Related> related_articles(const std::string& id, RecMode mode, std::size_t k = 10) const;

  const TfIdf& tfidf() const { return tfidf_; }
  const ClickstreamGraph& graph() const { return graph_; }

 private:
  TfIdf tfidf_;
  ClickstreamGraph graph_;
};

}  // namespace hisva

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hisva/dates.hpp"
#include "hisva/index.hpp"
#include "hisva/relevance.hpp"

namespace hisva {

/// A row of the resource list view.
struct ListEntry {
  std::string article_id;
  std::string title;
  std::optional<std::string> thumbnail;
  std::optional<DateValue> event_date;
  int topic = -1;
  double topic_weight = 0.0;
  double pagerank = 0.0;
  double importance = 0.0;  // score under the active recommendation mode
  bool highlighted = false;
};

/// Highlighting uses the same predicate as the important-event dots.
ListEntry make_list_entry(const IndexedEvent& e, const ImportanceScores& scores, RecMode mode,
                          double threshold);

enum class SortKey { Date, Importance, Topic };
std::optional<SortKey> parse_sort_key(std::string_view s);

/// Stable. Date ascending (undated last), importance descending, or topic
/// index ascending then date.
std::vector<ListEntry> sort_list(std::vector<ListEntry> entries, SortKey key);

struct SearchHit {
  std::string article_id;
  double score = 0.0;  // TF-IDF cosine between query and article
  bool title_match = false;  // title contains the query
  bool exact_title = false;  // title equals the query
};

struct SearchResult {
  enum class Status { Ok, NoQuery };
  Status status = Status::Ok;
  std::vector<SearchHit> hits;
};

/// Keyword search over article text. Exact title matches come first, then
/// titles containing the whole query (both case-insensitive), then body-only
/// matches; within a tier by score, then by id.
class SearchIndex {
 public:
  SearchIndex(const TfIdf& tfidf, std::map<std::string, std::string> titles)
      : tfidf_(&tfidf), titles_(std::move(titles)) {}

  SearchResult search(std::string_view query) const;

 private:
  const TfIdf* tfidf_;
  std::map<std::string, std::string> titles_;
};

}  // namespace hisva

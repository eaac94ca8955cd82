#include "hisva/listing.hpp"

#include <algorithm>
#include <cctype>

#include "hisva/text.hpp"

namespace hisva {

ListEntry make_list_entry(const IndexedEvent& e, const ImportanceScores& scores, RecMode mode,
                          double threshold) {
  ListEntry row;
  row.article_id = e.id;
  row.title = e.title;
  row.thumbnail = e.thumbnail;
  row.event_date = e.date;
  row.topic = e.topic;
  row.topic_weight = e.topic_weight;
  if (auto it = scores.pagerank.find(e.id); it != scores.pagerank.end()) row.pagerank = it->second;
  row.importance = scores.score(e.id, mode).value_or(0.0);
  row.highlighted = is_important(e, scores, mode, threshold);
  return row;
}

std::optional<SortKey> parse_sort_key(std::string_view s) {
  if (s == "date") return SortKey::Date;
  if (s == "importance") return SortKey::Importance;
  if (s == "topic") return SortKey::Topic;
  return std::nullopt;
}

namespace {

// undated entries sort after every dated one
bool date_before(const ListEntry& a, const ListEntry& b) {
  if (!a.event_date || !b.event_date) return a.event_date.has_value() && !b.event_date.has_value();
  return *a.event_date < *b.event_date;
}

}  // namespace

std::vector<ListEntry> sort_list(std::vector<ListEntry> entries, SortKey key) {
  switch (key) {
    case SortKey::Date:
      std::stable_sort(entries.begin(), entries.end(), date_before);
      break;
    case SortKey::Importance:
      std::stable_sort(entries.begin(), entries.end(),
                       [](const ListEntry& a, const ListEntry& b) { return a.importance > b.importance; });
      break;
    case SortKey::Topic:
      std::stable_sort(entries.begin(), entries.end(), [](const ListEntry& a, const ListEntry& b) {
        // unmodeled (-1) entries go last
        const auto ta = static_cast<unsigned>(a.topic);
        const auto tb = static_cast<unsigned>(b.topic);
        if (ta != tb) return ta < tb;
        return date_before(a, b);
      });
      break;
  }
  return entries;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

SearchResult SearchIndex::search(std::string_view query) const {
  SearchResult r;
  auto q = trim(query);
  if (q.empty()) {
    r.status = SearchResult::Status::NoQuery;
    return r;
  }
  const std::string needle = lower(q);
  const SparseVector qv = tfidf_->vectorize(tokenize(q));
  for (const auto& doc : tfidf_->documents()) {
    SearchHit hit{doc.id, qv.empty() ? 0.0 : dot(qv, doc.weights)};
    if (auto t = titles_.find(doc.id); t != titles_.end()) {
      const std::string title = lower(t->second);
      hit.title_match = title.find(needle) != std::string::npos;
      hit.exact_title = title == needle;
    }
    if (hit.title_match || hit.score > 0.0) r.hits.push_back(std::move(hit));
  }
  std::sort(r.hits.begin(), r.hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.exact_title != b.exact_title) return a.exact_title;
    if (a.title_match != b.title_match) return a.title_match;
    if (a.score != b.score) return a.score > b.score;
    return a.article_id < b.article_id;
  });
  return r;
}

}  // namespace hisva

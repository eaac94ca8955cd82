#include "hisva/events.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <thread>

namespace hisva {

namespace {

template <typename Key>
void bump(std::map<Key, Tally>& counts, const Key& key, std::size_t offset) {
  auto [it, fresh] = counts.try_emplace(key, Tally{0, offset});
  ++it->second.count;
  it->second.first_offset = std::min(it->second.first_offset, offset);
}

}  // namespace

std::map<DateValue, Tally> tally_dates(const std::vector<DateMention>& mentions) {
  std::map<DateValue, Tally> counts;
  for (const auto& m : mentions) bump(counts, m.value, m.char_offset);
  return counts;
}

std::map<std::string, Tally> tally_locations(const std::vector<LocationMention>& mentions) {
  std::map<std::string, Tally> counts;
  for (const auto& m : mentions) bump(counts, m.gazetteer_id, m.char_offset);
  return counts;
}

std::vector<int> EventRecord::all_years() const {
  std::set<int> years;
  for (const auto& [value, tally] : date_counts) years.insert(value.year);
  return {years.begin(), years.end()};
}

std::size_t EventRecord::total_date_mentions() const {
  std::size_t total = 0;
  for (const auto& [value, tally] : date_counts) total += tally.count;
  return total;
}

EventRecord build_event_record(const Article& article, const Gazetteer& gazetteer) {
  EventRecord rec;
  rec.article_id = article.id;
  rec.date_counts = tally_dates(extract_dates(article.text));
  rec.location_counts = tally_locations(gazetteer.extract_locations(article.text));
  rec.representative_date = representative(rec.date_counts);
  rec.representative_location = representative(rec.location_counts);
  if (rec.representative_location) rec.geo = gazetteer.geocode(*rec.representative_location);
  return rec;
}

std::vector<EventRecord> extract_events(const ArticleCollection& coll,
                                        const std::vector<std::string>& ids,
                                        const Gazetteer& gazetteer, unsigned threads) {
  std::vector<std::string> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<const Article*> articles;
  articles.reserve(sorted.size());
  for (const auto& id : sorted) {
    const Article* a = coll.find(id);
    if (!a) throw std::invalid_argument("unknown article id: " + id);
    articles.push_back(a);
  }

  std::vector<EventRecord> out(articles.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(articles.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < articles.size(); ++i) out[i] = build_event_record(*articles[i], gazetteer);
    return out;
  }
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < articles.size(); i += threads) {
        out[i] = build_event_record(*articles[i], gazetteer);
      }
    });
  }
  workers.clear();
  return out;
}

}  // namespace hisva

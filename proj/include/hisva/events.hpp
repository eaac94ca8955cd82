#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hisva/corpus.hpp"
#include "hisva/dates.hpp"
#include "hisva/gazetteer.hpp"

namespace hisva {

/// Mention count plus where the value first appeared in the article.
struct Tally {
  std::size_t count = 0;
  std::size_t first_offset = 0;

  bool operator==(const Tally&) const = default;
};

/// Most frequent value; ties go to the value seen first in the text. Returns
/// nullopt for an empty map (the event has no anchor).
template <typename Key>
std::optional<Key> representative(const std::map<Key, Tally>& counts) {
  const Key* best = nullptr;
  const Tally* best_tally = nullptr;
  for (const auto& [key, tally] : counts) {
    if (!best || tally.count > best_tally->count ||
        (tally.count == best_tally->count && tally.first_offset < best_tally->first_offset)) {
      best = &key;
      best_tally = &tally;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::map<DateValue, Tally> tally_dates(const std::vector<DateMention>& mentions);
std::map<std::string, Tally> tally_locations(const std::vector<LocationMention>& mentions);

struct EventRecord {
  std::string article_id;
  std::optional<DateValue> representative_date;
  std::optional<std::string> representative_location;
  std::optional<GeoPoint> geo;
  std::map<DateValue, Tally> date_counts;
  std::map<std::string, Tally> location_counts;

  /// Has both a representative date and a geocoded location. Unanchored
  /// events stay searchable but are left off the map and the timeline.
  bool anchored() const { return representative_date.has_value() && geo.has_value(); }
  /// Distinct years among all date mentions, ascending.
  std::vector<int> all_years() const;
  std::size_t total_date_mentions() const;
};

EventRecord build_event_record(const Article& article, const Gazetteer& gazetteer);

/// Builds records for `ids` (sorted by id). Work is split across `threads`
/// workers; output is identical to a sequential run.
std::vector<EventRecord> extract_events(const ArticleCollection& coll,
                                        const std::vector<std::string>& ids,
                                        const Gazetteer& gazetteer, unsigned threads = 1);

}  // namespace hisva

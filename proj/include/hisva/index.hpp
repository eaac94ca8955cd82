#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hisva/dates.hpp"
#include "hisva/gazetteer.hpp"
#include "hisva/relevance.hpp"

namespace hisva {

/// FREQ_DATE counts an event once at its representative year; ALL_DATE at
/// every distinct year its article mentions.
enum class DateMode { Freq, All };

struct BBox {
  double south = -90.0;
  double west = -180.0;
  double north = 90.0;
  double east = 180.0;

  bool contains(double lat, double lon) const {
    return lat >= south && lat <= north && lon >= west && lon <= east;
  }
  bool operator==(const BBox&) const = default;
};

using CountrySet = std::set<std::string>;
using Region = std::variant<std::monostate, BBox, CountrySet>;

/// Cross-view coordination state. Every read query takes the full state.
struct FilterState {
  std::optional<int> year_from;
  std::optional<int> year_to;
  Region region;
  /// Topics whose charts are shown; unset means all.
  std::optional<std::set<int>> visible_topics;
  DateMode date_mode = DateMode::Freq;
  bool normalized = false;
  RecMode rec = RecMode::Topic;
  double threshold = 0.0;
  /// Restrict to events passing the importance threshold (dot-filtered view).
  bool important_only = false;
  std::string search;

  /// Throws std::invalid_argument for an inverted time range, an unordered
  /// bbox or a threshold outside [0, 1].
  void validate() const;
  bool has_region() const { return !std::holds_alternative<std::monostate>(region); }
};

/// One event as the views see it.
struct IndexedEvent {
  std::string id;
  std::string title;
  std::optional<DateValue> date;  // representative
  std::vector<int> years;         // distinct mentioned years, ascending
  std::optional<std::string> location_id;
  std::optional<GeoPoint> geo;
  std::vector<double> topic_weights;  // empty when the article was not modeled
  int topic = -1;                     // dominant topic, -1 when unmodeled
  double topic_weight = 0.0;
  std::optional<std::string> thumbnail;

  bool anchored() const { return date.has_value() && geo.has_value(); }
  int year() const { return date->year; }
};

/// Which topic charts an event belongs to: only its dominant topic, or every
/// topic whose weight reaches `min_weight`.
struct TopicAssignment {
  enum class Rule { ArgMax, AboveWeight };
  Rule rule = Rule::ArgMax;
  double min_weight = 0.2;

  bool member(const IndexedEvent& e, int topic) const;
};

using EventSpan = std::span<const IndexedEvent>;

/// Anchored events passing every active filter dimension, in index order.
std::vector<const IndexedEvent*> select_events(EventSpan events, const FilterState& filter,
                                               const ImportanceScores& scores,
                                               const TopicAssignment& assign = {});
std::set<std::string> filter_events(EventSpan events, const FilterState& filter,
                                    const ImportanceScores& scores,
                                    const TopicAssignment& assign = {});

bool is_important(const IndexedEvent& e, const ImportanceScores& scores, RecMode mode, double threshold);

struct TimeSeries {
  std::optional<int> topic;  // unset for the summary chart
  std::map<int, double> bins;
  DateMode date_mode = DateMode::Freq;
  bool normalized = false;

  double total() const;
  double max() const;
};

/// Events per year for one topic chart or (topic unset) the summary chart.
/// ALL_DATE years outside the active time range are not binned.
TimeSeries timeline(EventSpan events, const FilterState& filter, const ImportanceScores& scores,
                    std::optional<int> topic, const TopicAssignment& assign = {});

struct Dot {
  int topic = 0;
  int start_year = 0;
  int end_year = 0;
  std::vector<std::string> members;

  bool wide() const { return members.size() > 1; }
};

/// 2 years across a 100-year range, scaled to the active range.
double default_merge_window(const FilterState& filter);

/// Important events of a topic, sorted by year and merged left to right while
/// the gap to the previous member is at most `merge_window_years`.
std::vector<Dot> important_dots(EventSpan events, const ImportanceScores& scores,
                                const FilterState& filter, int topic, double merge_window_years,
                                const TopicAssignment& assign = {});

struct ClusterOptions {
  double cell_degrees = 180.0;  // cell edge at zoom 0
  int min_zoom = 0;
  int max_zoom = 18;
};

struct ClusterMarker {
  GeoPoint centroid;  // country_code set only when all members share it
  std::size_t count = 0;
  std::vector<std::string> member_ids;
  int zoom = 0;
};

/// Grid clustering with cells of cell_degrees / 2^zoom; at max_zoom every
/// event is its own marker. Throws std::invalid_argument for a zoom outside
/// [min_zoom, max_zoom].
std::vector<ClusterMarker> cluster_markers(EventSpan events, const FilterState& filter,
                                           const ImportanceScores& scores, int zoom,
                                           const ClusterOptions& opts = {},
                                           const TopicAssignment& assign = {});

/// Earliest and latest representative year of the given events.
std::optional<std::pair<int, int>> region_time_span(const std::vector<const IndexedEvent*>& events);

}  // namespace hisva

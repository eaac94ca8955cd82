#include "hisva/index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace hisva {

void FilterState::validate() const {
  if (year_from && year_to && *year_from > *year_to) throw std::invalid_argument("time range is inverted");
  if (const auto* b = std::get_if<BBox>(&region)) {
    if (!(b->south <= b->north) || !(b->west <= b->east)) throw std::invalid_argument("bbox corners are not ordered");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in [0, 1]");
}

bool TopicAssignment::member(const IndexedEvent& e, int topic) const {
  if (rule == Rule::ArgMax) return e.topic >= 0 && e.topic == topic;
  if (topic < 0 || static_cast<std::size_t>(topic) >= e.topic_weights.size()) return false;
  return e.topic_weights[static_cast<std::size_t>(topic)] >= min_weight;
}

bool is_important(const IndexedEvent& e, const ImportanceScores& scores, RecMode mode, double threshold) {
  auto s = scores.score(e.id, mode);
  return s && passes_threshold(*s, threshold);
}

namespace {

bool topic_visible(const IndexedEvent& e, const FilterState& f, const TopicAssignment& assign) {
  if (!f.visible_topics) return true;
  for (int t : *f.visible_topics) {
    if (assign.member(e, t)) return true;
  }
  return false;
}

bool in_region(const IndexedEvent& e, const Region& region) {
  if (const auto* b = std::get_if<BBox>(&region)) return b->contains(e.geo->lat, e.geo->lon);
  if (const auto* c = std::get_if<CountrySet>(&region)) return c->count(e.geo->country_code) != 0;
  return true;
}

}  // namespace

std::vector<const IndexedEvent*> select_events(EventSpan events, const FilterState& filter,
                                               const ImportanceScores& scores,
                                               const TopicAssignment& assign) {
  std::vector<const IndexedEvent*> out;
  for (const auto& e : events) {
    if (!e.anchored()) continue;
    if (filter.year_from && e.year() < *filter.year_from) continue;
    if (filter.year_to && e.year() > *filter.year_to) continue;
    if (!in_region(e, filter.region)) continue;
    if (!topic_visible(e, filter, assign)) continue;
    if (filter.important_only && !is_important(e, scores, filter.rec, filter.threshold)) continue;
    out.push_back(&e);
  }
  return out;
}

std::set<std::string> filter_events(EventSpan events, const FilterState& filter,
                                    const ImportanceScores& scores, const TopicAssignment& assign) {
  std::set<std::string> ids;
  for (const auto* e : select_events(events, filter, scores, assign)) ids.insert(e->id);
  return ids;
}

double TimeSeries::total() const {
  double t = 0.0;
  for (const auto& [y, v] : bins) t += v;
  return t;
}

double TimeSeries::max() const {
  double m = 0.0;
  for (const auto& [y, v] : bins) m = std::max(m, v);
  return m;
}

TimeSeries timeline(EventSpan events, const FilterState& filter, const ImportanceScores& scores,
                    std::optional<int> topic, const TopicAssignment& assign) {
  TimeSeries ts;
  ts.topic = topic;
  ts.date_mode = filter.date_mode;
  ts.normalized = filter.normalized;
  auto in_range = [&](int y) {
    return (!filter.year_from || y >= *filter.year_from) && (!filter.year_to || y <= *filter.year_to);
  };
  for (const auto* e : select_events(events, filter, scores, assign)) {
    if (topic && !assign.member(*e, *topic)) continue;
    if (filter.date_mode == DateMode::Freq) {
      ts.bins[e->year()] += 1.0;
    } else {
      for (int y : e->years) {
        if (in_range(y)) ts.bins[y] += 1.0;
      }
    }
  }
  if (filter.normalized) {
    const double peak = ts.max();
    if (peak > 0.0) {
      for (auto& [y, v] : ts.bins) v /= peak;
    }
  }
  return ts;
}

double default_merge_window(const FilterState& filter) {
  constexpr double kBaseWindow = 2.0;
  constexpr double kBaseExtent = 100.0;
  if (filter.year_from && filter.year_to) {
    double extent = std::max(1, *filter.year_to - *filter.year_from);
    return kBaseWindow * extent / kBaseExtent;
  }
  return kBaseWindow;
}

std::vector<Dot> important_dots(EventSpan events, const ImportanceScores& scores,
                                const FilterState& filter, int topic, double merge_window_years,
                                const TopicAssignment& assign) {
  std::vector<const IndexedEvent*> picked;
  for (const auto* e : select_events(events, filter, scores, assign)) {
    if (assign.member(*e, topic) && is_important(*e, scores, filter.rec, filter.threshold)) picked.push_back(e);
  }
  std::sort(picked.begin(), picked.end(), [](const IndexedEvent* a, const IndexedEvent* b) {
    return std::tie(a->date->year, a->id) < std::tie(b->date->year, b->id);
  });

  std::vector<Dot> dots;
  for (const auto* e : picked) {
    if (!dots.empty() && e->year() - dots.back().end_year <= merge_window_years) {
      dots.back().end_year = e->year();
      dots.back().members.push_back(e->id);
    } else {
      dots.push_back(Dot{topic, e->year(), e->year(), {e->id}});
    }
  }
  return dots;
}

std::vector<ClusterMarker> cluster_markers(EventSpan events, const FilterState& filter,
                                           const ImportanceScores& scores, int zoom,
                                           const ClusterOptions& opts, const TopicAssignment& assign) {
  if (zoom < opts.min_zoom || zoom > opts.max_zoom) throw std::invalid_argument("zoom level out of range");
  if (!(opts.cell_degrees > 0.0)) throw std::invalid_argument("cell size must be positive");

  auto selected = select_events(events, filter, scores, assign);
  std::vector<std::vector<const IndexedEvent*>> groups;
  if (zoom == opts.max_zoom) {
    for (const auto* e : selected) groups.push_back({e});
  } else {
    const double cell = std::ldexp(opts.cell_degrees, -zoom);
    const auto rows = static_cast<long long>(std::ceil(180.0 / cell));
    const auto cols = static_cast<long long>(std::ceil(360.0 / cell));
    std::map<std::pair<long long, long long>, std::vector<const IndexedEvent*>> cells;
    for (const auto* e : selected) {
      auto r = std::clamp(static_cast<long long>(std::floor((e->geo->lat + 90.0) / cell)), 0LL, rows - 1);
      auto c = std::clamp(static_cast<long long>(std::floor((e->geo->lon + 180.0) / cell)), 0LL, cols - 1);
      cells[{r, c}].push_back(e);
    }
    for (auto& [key, members] : cells) groups.push_back(std::move(members));
  }

  std::vector<ClusterMarker> markers;
  markers.reserve(groups.size());
  for (const auto& g : groups) {
    ClusterMarker m;
    m.zoom = zoom;
    m.count = g.size();
    double lat = 0.0;
    double lon = 0.0;
    std::string country = g.front()->geo->country_code;
    for (const auto* e : g) {
      lat += e->geo->lat;
      lon += e->geo->lon;
      if (e->geo->country_code != country) country.clear();
      m.member_ids.push_back(e->id);
    }
    m.centroid = GeoPoint{lat / static_cast<double>(g.size()), lon / static_cast<double>(g.size()), country};
    markers.push_back(std::move(m));
  }
  return markers;
}

std::optional<std::pair<int, int>> region_time_span(const std::vector<const IndexedEvent*>& events) {
  std::optional<std::pair<int, int>> span;
  for (const auto* e : events) {
    if (!e->date) continue;
    if (!span) {
      span = std::pair{e->year(), e->year()};
    } else {
      span->first = std::min(span->first, e->year());
      span->second = std::max(span->second, e->year());
    }
  }
  return span;
}

}  // namespace hisva

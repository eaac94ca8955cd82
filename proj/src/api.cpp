#include "hisva/api.hpp"

#include <charconv>
#include <condition_variable>
#include <mutex>
#include <sstream>
#include <thread>

#include "httplib.h"

namespace hisva {

using nlohmann::json;

Engine::Engine(IndexData data) : data_(std::move(data)) {
  std::set<std::string> ids;
  std::vector<std::pair<std::string, std::string>> docs;
  std::map<std::string, std::string> titles;
  for (std::size_t i = 0; i < data_.events.size(); ++i) {
    const auto& e = data_.events[i];
    by_id_.emplace(e.id, i);
    ids.insert(e.id);
    auto text = data_.texts.find(e.id);
    docs.emplace_back(e.id, text == data_.texts.end() ? std::string() : text->second);
    titles.emplace(e.id, e.title);
  }
  ClickstreamGraph graph(ids);
  for (const auto& [s, t, c] : data_.edges) graph.add_edge(s, t, c);
  recommender_ = std::make_unique<Recommender>(TfIdf(build_corpus(docs, true).corpus), std::move(graph));
  search_ = std::make_unique<SearchIndex>(recommender_->tfidf(), std::move(titles));
}

const IndexedEvent* Engine::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &data_.events[it->second];
}

double Engine::merge_window(const FilterState& filter) const {
  return data_.merge_window_years ? *data_.merge_window_years : default_merge_window(filter);
}

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw BadRequest("parameter '" + key + "' is not an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw BadRequest("parameter '" + key + "' is not a number");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw BadRequest("parameter '" + key + "' is not a boolean");
}

const std::string* param(const std::map<std::string, std::string>& params, const std::string& key) {
  auto it = params.find(key);
  return it == params.end() || it->second.empty() ? nullptr : &it->second;
}

json api_body(json body) {
  body["api_version"] = kApiVersion;
  return body;
}

ApiResponse ok(json body) { return {200, api_body(std::move(body))}; }
ApiResponse error(int status, const std::string& message) { return {status, api_body({{"error", message}})}; }

json date_json(const std::optional<DateValue>& d) { return d ? json(d->iso()) : json(nullptr); }

json geo_json(const std::optional<GeoPoint>& g) {
  if (!g) return nullptr;
  return {{"lat", g->lat}, {"lon", g->lon}, {"country_code", g->country_code}};
}

std::optional<int> topic_param(const ApiRequest& req, int num_topics) {
  const std::string* t = param(req.params, "topic");
  if (!t) return std::nullopt;
  int k = parse_int("topic", *t);
  if (k < 0 || k >= num_topics) throw BadRequest("topic index out of range");
  return k;
}

}  // namespace

FilterState parse_filter(const std::map<std::string, std::string>& params) {
  FilterState f;
  if (auto v = param(params, "from")) f.year_from = parse_int("from", *v);
  if (auto v = param(params, "to")) f.year_to = parse_int("to", *v);
  auto bbox = param(params, "bbox");
  auto countries = param(params, "countries");
  if (bbox && countries) throw BadRequest("bbox and countries are mutually exclusive");
  if (bbox) {
    auto parts = split_commas(*bbox);
    if (parts.size() != 4) throw BadRequest("bbox needs south,west,north,east");
    f.region = BBox{parse_double("bbox", parts[0]), parse_double("bbox", parts[1]),
                    parse_double("bbox", parts[2]), parse_double("bbox", parts[3])};
  } else if (countries) {
    auto parts = split_commas(*countries);
    f.region = CountrySet(parts.begin(), parts.end());
  }
  if (auto v = param(params, "topics")) {
    std::set<int> visible;
    for (const auto& p : split_commas(*v)) visible.insert(parse_int("topics", p));
    f.visible_topics = std::move(visible);
  }
  if (auto v = param(params, "mode")) {
    if (*v == "freq" || *v == "FREQ_DATE") {
      f.date_mode = DateMode::Freq;
    } else if (*v == "all" || *v == "ALL_DATE") {
      f.date_mode = DateMode::All;
    } else {
      throw BadRequest("mode must be freq or all");
    }
  }
  if (auto v = param(params, "normalized")) f.normalized = parse_bool("normalized", *v);
  if (auto v = param(params, "rec")) {
    auto mode = parse_rec_mode(*v);
    if (!mode) throw BadRequest("rec must be topic or popular");
    f.rec = *mode;
  }
  if (auto v = param(params, "threshold")) f.threshold = parse_double("threshold", *v);
  if (auto v = param(params, "important")) f.important_only = parse_bool("important", *v);
  if (auto v = param(params, "q")) f.search = *v;
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw BadRequest(e.what());
  }
  return f;
}

json to_json(const ListEntry& e) {
  return {{"article_id", e.article_id},
          {"title", e.title},
          {"thumbnail", e.thumbnail ? json(*e.thumbnail) : json(nullptr)},
          {"date", date_json(e.event_date)},
          {"topic", e.topic},
          {"topic_weight", e.topic_weight},
          {"pagerank", e.pagerank},
          {"importance", e.importance},
          {"highlighted", e.highlighted}};
}

json to_json(const Note& n) {
  return {{"id", n.id},
          {"article_id", n.article_id},
          {"title", n.title},
          {"keywords", n.keywords},
          {"body", n.body},
          {"created_at", n.created_at_iso()},
          {"created_at_ms", n.created_at_ms}};
}

ApiResponse Api::handle(const ApiRequest& req) const {
  try {
    const std::string& p = req.path;
    auto tail = [&](const std::string& prefix) -> std::optional<std::string> {
      if (p.size() <= prefix.size() || p.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
      return p.substr(prefix.size());
    };
    if (req.method == "POST") {
      if (p == "/notes") return create_note(req);
      return error(404, "no such endpoint");
    }
    if (req.method != "GET") return error(405, "method not allowed");
    if (p == "/health") return ok({{"status", "ok"}});
    if (p == "/topics") return topics();
    if (p == "/timeline") return timeline(req);
    if (p == "/dots") return dots(req);
    if (p == "/clusters") return clusters(req);
    if (p == "/events") return events(req);
    if (p == "/search") return search(req);
    if (p == "/region-span") return region_span(req);
    if (p == "/notes") return list_notes();
    if (auto id = tail("/article/")) return article(*id);
    if (auto id = tail("/related/")) return related(*id, req);
    if (auto id = tail("/notes/")) return get_note(*id);
    return error(404, "no such endpoint");
  } catch (const BadRequest& e) {
    return error(400, e.what());
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  }
}

ApiResponse Api::topics() const {
  const auto& d = engine_.data();
  std::vector<std::size_t> sizes(static_cast<std::size_t>(d.num_topics), 0);
  for (const auto& e : d.events) {
    if (e.topic >= 0) ++sizes[static_cast<std::size_t>(e.topic)];
  }
  json topics = json::array();
  for (int k = 0; k < d.num_topics; ++k) {
    topics.push_back({{"index", k},
                      {"order", k},
                      {"keywords", d.keywords.at(static_cast<std::size_t>(k))},
                      {"events", sizes[static_cast<std::size_t>(k)]}});
  }
  return ok({{"num_topics", d.num_topics},
             {"coherence", d.coherence ? json(*d.coherence) : json(nullptr)},
             {"topics", std::move(topics)}});
}

ApiResponse Api::timeline(const ApiRequest& req) const {
  FilterState f = parse_filter(req.params);
  auto topic = topic_param(req, engine_.data().num_topics);
  auto ts = hisva::timeline(engine_.events(), f, engine_.scores(), topic, engine_.data().assignment);
  json bins = json::array();
  for (const auto& [y, v] : ts.bins) bins.push_back({{"year", y}, {"value", v}});
  return ok({{"topic", topic ? json(*topic) : json(nullptr)},
             {"mode", f.date_mode == DateMode::Freq ? "FREQ_DATE" : "ALL_DATE"},
             {"normalized", f.normalized},
             {"bins", std::move(bins)},
             {"total", ts.total()}});
}

ApiResponse Api::dots(const ApiRequest& req) const {
  FilterState f = parse_filter(req.params);
  const int K = engine_.data().num_topics;
  auto topic = topic_param(req, K);
  double window = engine_.merge_window(f);
  if (auto w = param(req.params, "window")) window = parse_double("window", *w);

  json rows = json::array();
  for (int k = 0; k < K; ++k) {
    if (topic && k != *topic) continue;
    json dots = json::array();
    for (const auto& d : important_dots(engine_.events(), engine_.scores(), f, k, window, engine_.data().assignment)) {
      json members = json::array();
      for (const auto& id : d.members) {
        const auto* e = engine_.find(id);
        members.push_back({{"id", id},
                           {"title", e->title},
                           {"date", date_json(e->date)},
                           {"thumbnail", e->thumbnail ? json(*e->thumbnail) : json(nullptr)}});
      }
      dots.push_back({{"start_year", d.start_year},
                      {"end_year", d.end_year},
                      {"count", d.members.size()},
                      {"wide", d.wide()},
                      {"members", std::move(members)}});
    }
    rows.push_back({{"topic", k}, {"dots", std::move(dots)}});
  }
  return ok({{"rec", std::string(to_string(f.rec))}, {"threshold", f.threshold}, {"window", window}, {"rows", std::move(rows)}});
}

ApiResponse Api::clusters(const ApiRequest& req) const {
  FilterState f = parse_filter(req.params);
  const auto& opts = engine_.data().clusters;
  int zoom = opts.min_zoom;
  if (auto z = param(req.params, "zoom")) zoom = parse_int("zoom", *z);
  auto markers = cluster_markers(engine_.events(), f, engine_.scores(), zoom, opts, engine_.data().assignment);
  json arr = json::array();
  std::size_t total = 0;
  for (const auto& m : markers) {
    total += m.count;
    json mj{{"lat", m.centroid.lat},
            {"lon", m.centroid.lon},
            {"country_code", m.centroid.country_code.empty() ? json(nullptr) : json(m.centroid.country_code)},
            {"count", m.count}};
    mj["members"] = zoom == opts.max_zoom || m.count == 1 ? json(m.member_ids) : json(nullptr);
    arr.push_back(std::move(mj));
  }
  return ok({{"zoom", zoom}, {"min_zoom", opts.min_zoom}, {"max_zoom", opts.max_zoom}, {"total", total}, {"markers", std::move(arr)}});
}

ApiResponse Api::events(const ApiRequest& req) const {
  FilterState f = parse_filter(req.params);
  SortKey key = SortKey::Date;
  if (auto s = param(req.params, "sort")) {
    auto k = parse_sort_key(*s);
    if (!k) throw BadRequest("sort must be date, importance or topic");
    key = *k;
  }
  std::vector<ListEntry> rows;
  for (const auto* e : select_events(engine_.events(), f, engine_.scores(), engine_.data().assignment)) {
    rows.push_back(make_list_entry(*e, engine_.scores(), f.rec, f.threshold));
  }
  rows = sort_list(std::move(rows), key);
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return ok({{"count", rows.size()}, {"entries", std::move(arr)}});
}

ApiResponse Api::article(const std::string& id) const {
  const auto* e = engine_.find(id);
  if (!e) return error(404, "unknown article: " + id);
  const auto& d = engine_.data();
  json dates = json::array();
  if (auto it = d.date_counts.find(id); it != d.date_counts.end()) {
    for (const auto& [v, t] : it->second) dates.push_back({{"date", v.iso()}, {"count", t.count}, {"first_offset", t.first_offset}});
  }
  json locations = json::array();
  if (auto it = d.location_counts.find(id); it != d.location_counts.end()) {
    for (const auto& [loc, t] : it->second) locations.push_back({{"id", loc}, {"count", t.count}, {"first_offset", t.first_offset}});
  }
  auto score = [&](const std::map<std::string, double>& m) {
    auto it = m.find(id);
    return it == m.end() ? json(nullptr) : json(it->second);
  };
  auto text = d.texts.find(id);
  return ok({{"id", e->id},
             {"title", e->title},
             {"thumbnail", e->thumbnail ? json(*e->thumbnail) : json(nullptr)},
             {"text", text == d.texts.end() ? "" : text->second},
             {"anchored", e->anchored()},
             {"date", date_json(e->date)},
             {"location", e->location_id ? json(*e->location_id) : json(nullptr)},
             {"geo", geo_json(e->geo)},
             {"dates", std::move(dates)},
             {"locations", std::move(locations)},
             {"topic", e->topic},
             {"topic_weights", e->topic_weights},
             {"pagerank", score(d.scores.pagerank)},
             {"popularity", score(d.scores.popularity)}});
}

ApiResponse Api::related(const std::string& id, const ApiRequest& req) const {
  RecMode mode = RecMode::Topic;
  if (auto r = param(req.params, "rec")) {
    auto m = parse_rec_mode(*r);
    if (!m) throw BadRequest("rec must be topic or popular");
    mode = *m;
  }
  std::size_t k = 10;
  if (auto v = param(req.params, "k")) {
    int n = parse_int("k", *v);
    if (n < 1) throw BadRequest("k must be positive");
    k = static_cast<std::size_t>(n);
  }
  std::vector<Related> rel;
  try {
    rel = engine_.recommender().related_articles(id, mode, k);
  } catch (const UnknownArticle& e) {
    return error(404, e.what());
  }
  json arr = json::array();
  for (const auto& r : rel) {
    const auto* e = engine_.find(r.id);
    arr.push_back({{"id", r.id}, {"title", e ? e->title : r.id}, {"score", r.score}});
  }
  return ok({{"id", id}, {"rec", std::string(to_string(mode))}, {"related", std::move(arr)}});
}

ApiResponse Api::search(const ApiRequest& req) const {
  FilterState f = parse_filter(req.params);
  auto result = engine_.search_index().search(f.search);
  json arr = json::array();
  for (const auto& hit : result.hits) {
    const auto* e = engine_.find(hit.article_id);
    json row = to_json(make_list_entry(*e, engine_.scores(), f.rec, f.threshold));
    row["score"] = hit.score;
    row["title_match"] = hit.title_match;
    arr.push_back(std::move(row));
  }
  return ok({{"status", result.status == SearchResult::Status::Ok ? "ok" : "no_query"},
             {"query", f.search},
             {"results", std::move(arr)}});
}

ApiResponse Api::region_span(const ApiRequest& req) const {
  FilterState f = parse_filter(req.params);
  auto selected = select_events(engine_.events(), f, engine_.scores(), engine_.data().assignment);
  auto span = region_time_span(selected);
  return ok({{"region_active", f.has_region()},
             {"count", selected.size()},
             {"span", span ? json::array({span->first, span->second}) : json(nullptr)}});
}

ApiResponse Api::create_note(const ApiRequest& req) const {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return error(400, "body must be a JSON object");
  NoteDraft draft;
  try {
    draft.article_id = j.at("article_id").get<std::string>();
    draft.title = j.at("title").get<std::string>();
    if (j.contains("keywords")) draft.keywords = j.at("keywords").get<std::vector<std::string>>();
    if (j.contains("body")) draft.body = j.at("body").get<std::string>();
  } catch (const json::exception&) {
    return error(400, "note needs string fields article_id and title");
  }
  try {
    return {201, api_body(to_json(notes_.create(draft)))};
  } catch (const NoteRejected& e) {
    return error(422, e.what());
  } catch (const NoteStorageError& e) {
    return error(500, e.what());
  }
}

ApiResponse Api::list_notes() const {
  json arr = json::array();
  for (const auto& n : notes_.list()) arr.push_back(to_json(n));
  return ok({{"notes", std::move(arr)}});
}

ApiResponse Api::get_note(const std::string& id) const {
  std::uint64_t n = 0;
  auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), n);
  if (ec != std::errc() || p != id.data() + id.size()) return error(400, "note id must be an integer");
  auto note = notes_.get(n);
  if (!note) return error(404, "unknown note: " + id);
  return ok(to_json(*note));
}

struct Server::Impl {
  explicit Impl(const Api& a) : api(a) {}
  const Api& api;
  httplib::Server svr;
  std::thread thread;
};

Server::Server(const Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.params[k] = v;
    r.body = req.body;
    ApiResponse out = impl_->api.handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  impl_->svr.Get(".*", dispatch);
  impl_->svr.Post(".*", dispatch);
}

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->svr.bind_to_any_port(host) : (impl_->svr.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->svr.listen_after_bind(); });
  impl_->svr.wait_until_ready();
  return bound;
}

void Server::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Server::stop() {
  if (!impl_) return;
  impl_->svr.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace hisva

#include "hisva/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hisva/coherence.hpp"
#include "hisva/gazetteer.hpp"
#include "hisva/lda.hpp"
#include "hisva/text.hpp"
#include "json.hpp"

namespace hisva {

using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_artifact(const fs::path& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing artifact " + path.string() + " (run the earlier stage first)");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw std::runtime_error("corrupt artifact " + path.string());
  if (j.value("format", "") != format) throw std::runtime_error(path.string() + " is not a " + format + " file");
  if (j.value("version", 0) != kArtifactVersion) {
    throw std::runtime_error(path.string() + ": unsupported version " + std::to_string(j.value("version", 0)));
  }
  return j;
}

json artifact(const std::string& format) { return json{{"format", format}, {"version", kArtifactVersion}}; }

json geo_to_json(const std::optional<GeoPoint>& g) {
  if (!g) return nullptr;
  return json{{"lat", g->lat}, {"lon", g->lon}, {"country_code", g->country_code}};
}

std::optional<GeoPoint> geo_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>(), j.at("country_code").get<std::string>()};
}

json date_to_json(const std::optional<DateValue>& d) { return d ? json(d->iso()) : json(nullptr); }

std::optional<DateValue> date_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  auto d = DateValue::parse_iso(j.get<std::string>());
  if (!d) throw std::runtime_error("bad date '" + j.get<std::string>() + "'");
  return d;
}

json date_counts_to_json(const std::map<DateValue, Tally>& counts) {
  json arr = json::array();
  for (const auto& [d, t] : counts) arr.push_back({{"date", d.iso()}, {"count", t.count}, {"first_offset", t.first_offset}});
  return arr;
}

std::map<DateValue, Tally> date_counts_from_json(const json& arr) {
  std::map<DateValue, Tally> out;
  for (const auto& e : arr) {
    out.emplace(*date_from_json(e.at("date")), Tally{e.at("count").get<std::size_t>(), e.at("first_offset").get<std::size_t>()});
  }
  return out;
}

json location_counts_to_json(const std::map<std::string, Tally>& counts) {
  json arr = json::array();
  for (const auto& [id, t] : counts) arr.push_back({{"id", id}, {"count", t.count}, {"first_offset", t.first_offset}});
  return arr;
}

std::map<std::string, Tally> location_counts_from_json(const json& arr) {
  std::map<std::string, Tally> out;
  for (const auto& e : arr) {
    out.emplace(e.at("id").get<std::string>(), Tally{e.at("count").get<std::size_t>(), e.at("first_offset").get<std::size_t>()});
  }
  return out;
}

json opt_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> opt_string_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

LoadedArticles load_with_seeds(const Config& cfg) {
  auto loaded = load_articles(cfg.articles);
  loaded.collection.set_seeds(cfg.seeds);
  return loaded;
}

std::vector<std::string> selected_ids(const Config& cfg) {
  json j = read_artifact(cfg.selection_path(), "hisva-selection");
  return j.at("selected").get<std::vector<std::string>>();
}

}  // namespace

Config Config::from_json_text(const std::string& text, const fs::path& base_dir) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config is not a JSON object");
  Config c;
  try {
    c.articles = resolve(base_dir, j.at("articles").get<std::string>());
    c.gazetteer = resolve(base_dir, j.at("gazetteer").get<std::string>());
    c.clickstream = resolve(base_dir, j.at("clickstream").get<std::string>());
    c.work_dir = resolve(base_dir, j.value("work_dir", std::string("work")));
    c.notes = j.contains("notes") ? resolve(base_dir, j.at("notes").get<std::string>()) : c.work_dir / "notes.jsonl";
    for (const auto& s : j.at("seeds")) c.seeds.insert(s.get<std::string>());

    if (auto s = j.find("selection"); s != j.end()) {
      c.selection.transitive = s->value("transitive", false);
      c.selection.event_type = s->value("event_type", std::string("event"));
    }
    if (auto e = j.find("extract"); e != j.end()) c.extract_threads = e->value("threads", 1u);
    if (auto t = j.find("topics"); t != j.end()) {
      c.topics.k_min = t->value("k_min", c.topics.k_min);
      c.topics.k_max = t->value("k_max", c.topics.k_max);
      c.topics.k_step = t->value("k_step", c.topics.k_step);
      if (t->contains("seeds")) c.topics.seeds = t->at("seeds").get<std::vector<std::uint64_t>>();
      if (t->contains("alpha") && !t->at("alpha").is_null()) c.topics.alpha = t->at("alpha").get<double>();
      c.topics.beta = t->value("beta", c.topics.beta);
      c.topics.iterations = t->value("iterations", c.topics.iterations);
      c.topics.coherence_window = t->value("coherence_window", c.topics.coherence_window);
      c.topics.threads = t->value("threads", c.topics.threads);
    }
    if (auto r = j.find("ranking"); r != j.end()) {
      c.ranking.damping = r->value("damping", c.ranking.damping);
      c.ranking.epsilon = r->value("epsilon", c.ranking.epsilon);
      c.ranking.max_iterations = r->value("max_iterations", c.ranking.max_iterations);
    }
    if (auto x = j.find("index"); x != j.end()) {
      c.clusters.cell_degrees = x->value("cell_degrees", c.clusters.cell_degrees);
      c.clusters.min_zoom = x->value("min_zoom", c.clusters.min_zoom);
      c.clusters.max_zoom = x->value("max_zoom", c.clusters.max_zoom);
      if (x->contains("merge_window_years") && !x->at("merge_window_years").is_null()) {
        c.merge_window_years = x->at("merge_window_years").get<double>();
      }
      auto rule = x->value("topic_assignment", std::string("argmax"));
      if (rule == "argmax") {
        c.assignment.rule = TopicAssignment::Rule::ArgMax;
      } else if (rule == "above_weight") {
        c.assignment.rule = TopicAssignment::Rule::AboveWeight;
      } else {
        throw ConfigError("unknown topic_assignment '" + rule + "'");
      }
      c.assignment.min_weight = x->value("topic_min_weight", c.assignment.min_weight);
    }
    if (auto s = j.find("serve"); s != j.end()) {
      c.host = s->value("host", c.host);
      c.port = s->value("port", c.port);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (c.seeds.empty()) throw ConfigError("config lists no seed articles");
  if (c.topics.k_min < 1 || c.topics.k_max < c.topics.k_min || c.topics.k_step < 1) {
    throw ConfigError("invalid topic-count range");
  }
  if (c.clusters.min_zoom > c.clusters.max_zoom) throw ConfigError("invalid zoom range");
  return c;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), fs::absolute(path).parent_path());
}

StageReport run_ingest(const Config& cfg) {
  auto loaded = load_with_seeds(cfg);
  auto selected = select_event_articles(loaded.collection, cfg.selection);

  json j = artifact("hisva-selection");
  j["articles_loaded"] = loaded.collection.articles.size();
  j["skipped"] = loaded.report.skipped;
  j["warnings"] = loaded.report.warnings;
  j["seeds"] = cfg.seeds;
  j["selected"] = selected;
  write_json(cfg.selection_path(), j);

  StageReport r;
  r.summary = "loaded " + std::to_string(loaded.collection.articles.size()) + " articles (" +
              std::to_string(loaded.report.skipped) + " skipped), selected " +
              std::to_string(selected.size()) + " event articles";
  r.warnings = loaded.report.warnings;
  return r;
}

StageReport run_extract(const Config& cfg) {
  auto loaded = load_with_seeds(cfg);
  auto ids = selected_ids(cfg);
  auto gazetteer = Gazetteer::load(cfg.gazetteer);
  auto records = extract_events(loaded.collection, ids, gazetteer, cfg.extract_threads);

  json events = json::array();
  std::size_t anchored = 0;
  StageReport r;
  for (const auto& rec : records) {
    if (rec.anchored()) {
      ++anchored;
    } else {
      r.warnings.push_back("unanchored event: " + rec.article_id);
    }
    events.push_back({{"id", rec.article_id},
                      {"representative_date", date_to_json(rec.representative_date)},
                      {"representative_location", opt_string(rec.representative_location)},
                      {"geo", geo_to_json(rec.geo)},
                      {"dates", date_counts_to_json(rec.date_counts)},
                      {"locations", location_counts_to_json(rec.location_counts)}});
  }
  json j = artifact("hisva-events");
  j["events"] = std::move(events);
  write_json(cfg.events_path(), j);
  r.summary = "extracted " + std::to_string(records.size()) + " events, " + std::to_string(anchored) + " anchored";
  return r;
}

namespace {

CorpusBuild event_corpus(const ArticleCollection& coll, const std::vector<std::string>& ids, bool keep_empty) {
  std::vector<std::pair<std::string, std::string>> docs;
  for (const auto& id : ids) {
    const Article* a = coll.find(id);
    if (!a) throw std::runtime_error("selected article missing from snapshot: " + id);
    docs.emplace_back(id, a->text);
  }
  return build_corpus(docs, keep_empty);
}

}  // namespace

StageReport run_model(const Config& cfg, const ModelOverrides& overrides) {
  auto loaded = load_with_seeds(cfg);
  auto ids = selected_ids(cfg);
  auto built = event_corpus(loaded.collection, ids, false);

  StageReport r;
  for (const auto& id : built.dropped) r.warnings.push_back("empty after preprocessing, not modeled: " + id);

  const int k_min = overrides.k_min.value_or(cfg.topics.k_min);
  const int k_max = overrides.k_max.value_or(cfg.topics.k_max);
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("invalid topic-count range");
  std::vector<int> ks;
  for (int k = k_min; k <= k_max; k += cfg.topics.k_step) ks.push_back(k);
  std::vector<std::uint64_t> seeds = overrides.seed ? std::vector<std::uint64_t>{*overrides.seed} : cfg.topics.seeds;

  SelectionParams params;
  params.base.alpha = cfg.topics.alpha;
  params.base.beta = cfg.topics.beta;
  params.base.iterations = cfg.topics.iterations;
  params.coherence_window = cfg.topics.coherence_window;
  params.threads = cfg.topics.threads;
  auto selection = select_model(built.corpus, ks, seeds, params);
  save_model(selection.best, cfg.model_path());

  std::ostringstream summary;
  summary << "fitted " << selection.candidates.size() << " candidates:";
  for (const auto& c : selection.candidates) {
    summary << " K=" << c.num_topics << "/seed=" << c.seed << ":";
    if (c.coherence) {
      summary << *c.coherence;
    } else {
      summary << "failed";
      r.warnings.push_back("K=" + std::to_string(c.num_topics) + " failed: " + c.error);
    }
  }
  summary << "; selected K=" << selection.best.num_topics << " (C_V " << selection.best.coherence.value_or(0.0) << ")";
  r.summary = summary.str();
  return r;
}

StageReport run_rank(const Config& cfg) {
  auto ids = selected_ids(cfg);
  std::set<std::string> nodes(ids.begin(), ids.end());
  if (nodes.empty()) throw std::runtime_error("no selected events to rank");
  auto click = load_clickstream(cfg.clickstream, nodes);
  auto pr = pagerank(click.graph, cfg.ranking);
  auto model = load_model(cfg.model_path());

  std::map<std::string, double> contribution;
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    contribution.emplace(model.doc_ids[d], dominant_topic(model.theta[d]).weight);
  }
  auto scores = make_importance(pr.scores, contribution);

  json edges = json::array();
  const auto& g = click.graph;
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    for (const auto& e : g.out_edges(u)) edges.push_back({g.ids()[u], g.ids()[e.target], e.count});
  }
  json j = artifact("hisva-ranking");
  j["pagerank"] = scores.pagerank;
  j["popularity"] = scores.popularity;
  j["topic_contribution"] = scores.topic_contribution;
  j["iterations"] = pr.iterations;
  j["converged"] = pr.converged;
  j["edges"] = std::move(edges);
  write_json(cfg.ranking_path(), j);

  StageReport r;
  r.warnings = click.warnings;
  if (!pr.converged) r.warnings.push_back("pagerank did not converge within max_iterations");
  r.summary = "ranked " + std::to_string(nodes.size()) + " events over " + std::to_string(click.kept) +
              " transitions (" + std::to_string(click.dropped) + " dropped), " +
              std::to_string(pr.iterations) + " iterations";
  return r;
}

StageReport run_index(const Config& cfg) {
  auto loaded = load_with_seeds(cfg);
  const auto& coll = loaded.collection;
  json events = read_artifact(cfg.events_path(), "hisva-events");
  json ranking = read_artifact(cfg.ranking_path(), "hisva-ranking");
  auto model = load_model(cfg.model_path());

  IndexData data;
  data.num_topics = model.num_topics;
  data.keywords = model.keywords;
  data.coherence = model.coherence;
  data.clusters = cfg.clusters;
  data.merge_window_years = cfg.merge_window_years;
  data.assignment = cfg.assignment;
  data.scores.pagerank = ranking.at("pagerank").get<std::map<std::string, double>>();
  data.scores.popularity = ranking.at("popularity").get<std::map<std::string, double>>();
  data.scores.topic_contribution = ranking.at("topic_contribution").get<std::map<std::string, double>>();
  for (const auto& e : ranking.at("edges")) {
    data.edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>(), e.at(2).get<std::uint64_t>());
  }

  for (const auto& ej : events.at("events")) {
    IndexedEvent e;
    e.id = ej.at("id").get<std::string>();
    const Article* a = coll.find(e.id);
    if (!a) throw std::runtime_error("event missing from snapshot: " + e.id);
    e.title = a->title;
    e.thumbnail = a->thumbnail;
    e.date = date_from_json(ej.at("representative_date"));
    e.location_id = opt_string_from(ej.at("representative_location"));
    e.geo = geo_from_json(ej.at("geo"));
    auto dates = date_counts_from_json(ej.at("dates"));
    std::set<int> years;
    for (const auto& [d, t] : dates) years.insert(d.year);
    e.years.assign(years.begin(), years.end());
    if (auto row = model.doc_index(e.id)) {
      e.topic_weights = model.theta[*row];
      auto dom = dominant_topic(e.topic_weights);
      e.topic = dom.topic;
      e.topic_weight = dom.weight;
    }
    data.texts.emplace(e.id, a->text);
    data.date_counts.emplace(e.id, std::move(dates));
    data.location_counts.emplace(e.id, location_counts_from_json(ej.at("locations")));
    data.events.push_back(std::move(e));
  }
  std::sort(data.events.begin(), data.events.end(),
            [](const IndexedEvent& a, const IndexedEvent& b) { return a.id < b.id; });
  save_index(data, cfg.index_path());

  std::size_t anchored = std::count_if(data.events.begin(), data.events.end(),
                                       [](const IndexedEvent& e) { return e.anchored(); });
  StageReport r;
  r.summary = "indexed " + std::to_string(data.events.size()) + " events (" + std::to_string(anchored) +
              " anchored), " + std::to_string(data.num_topics) + " topics";
  return r;
}

void save_index(const IndexData& data, const fs::path& path) {
  json j = artifact("hisva-index");
  j["num_topics"] = data.num_topics;
  j["keywords"] = data.keywords;
  j["coherence"] = data.coherence ? json(*data.coherence) : json(nullptr);
  json events = json::array();
  for (const auto& e : data.events) {
    json ej{{"id", e.id},
            {"title", e.title},
            {"thumbnail", opt_string(e.thumbnail)},
            {"date", date_to_json(e.date)},
            {"years", e.years},
            {"location", opt_string(e.location_id)},
            {"geo", geo_to_json(e.geo)},
            {"topic_weights", e.topic_weights},
            {"topic", e.topic},
            {"topic_weight", e.topic_weight}};
    auto text = data.texts.find(e.id);
    ej["text"] = text == data.texts.end() ? "" : text->second;
    auto dc = data.date_counts.find(e.id);
    ej["dates"] = dc == data.date_counts.end() ? json::array() : date_counts_to_json(dc->second);
    auto lc = data.location_counts.find(e.id);
    ej["locations"] = lc == data.location_counts.end() ? json::array() : location_counts_to_json(lc->second);
    events.push_back(std::move(ej));
  }
  j["events"] = std::move(events);
  j["pagerank"] = data.scores.pagerank;
  j["popularity"] = data.scores.popularity;
  j["topic_contribution"] = data.scores.topic_contribution;
  json edges = json::array();
  for (const auto& [s, t, c] : data.edges) edges.push_back({s, t, c});
  j["edges"] = std::move(edges);
  j["clusters"] = {{"cell_degrees", data.clusters.cell_degrees},
                   {"min_zoom", data.clusters.min_zoom},
                   {"max_zoom", data.clusters.max_zoom}};
  j["merge_window_years"] = data.merge_window_years ? json(*data.merge_window_years) : json(nullptr);
  j["topic_assignment"] = {
      {"rule", data.assignment.rule == TopicAssignment::Rule::ArgMax ? "argmax" : "above_weight"},
      {"min_weight", data.assignment.min_weight}};
  write_json(path, j);
}

IndexData load_index(const fs::path& path) {
  json j;
  try {
    j = read_artifact(path, "hisva-index");
  } catch (const std::exception& e) {
    throw IndexLoadError(e.what());
  }
  IndexData d;
  try {
    d.num_topics = j.at("num_topics").get<int>();
    d.keywords = j.at("keywords").get<std::vector<std::vector<std::string>>>();
    if (!j.at("coherence").is_null()) d.coherence = j.at("coherence").get<double>();
    for (const auto& ej : j.at("events")) {
      IndexedEvent e;
      e.id = ej.at("id").get<std::string>();
      e.title = ej.at("title").get<std::string>();
      e.thumbnail = opt_string_from(ej.at("thumbnail"));
      e.date = date_from_json(ej.at("date"));
      e.years = ej.at("years").get<std::vector<int>>();
      e.location_id = opt_string_from(ej.at("location"));
      e.geo = geo_from_json(ej.at("geo"));
      e.topic_weights = ej.at("topic_weights").get<std::vector<double>>();
      e.topic = ej.at("topic").get<int>();
      e.topic_weight = ej.at("topic_weight").get<double>();
      if (e.topic >= d.num_topics) throw IndexLoadError("event topic out of range: " + e.id);
      d.texts.emplace(e.id, ej.at("text").get<std::string>());
      d.date_counts.emplace(e.id, date_counts_from_json(ej.at("dates")));
      d.location_counts.emplace(e.id, location_counts_from_json(ej.at("locations")));
      d.events.push_back(std::move(e));
    }
    d.scores.pagerank = j.at("pagerank").get<std::map<std::string, double>>();
    d.scores.popularity = j.at("popularity").get<std::map<std::string, double>>();
    d.scores.topic_contribution = j.at("topic_contribution").get<std::map<std::string, double>>();
    for (const auto& e : j.at("edges")) {
      d.edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>(), e.at(2).get<std::uint64_t>());
    }
    const auto& c = j.at("clusters");
    d.clusters.cell_degrees = c.at("cell_degrees").get<double>();
    d.clusters.min_zoom = c.at("min_zoom").get<int>();
    d.clusters.max_zoom = c.at("max_zoom").get<int>();
    if (!j.at("merge_window_years").is_null()) d.merge_window_years = j.at("merge_window_years").get<double>();
    const auto& ta = j.at("topic_assignment");
    d.assignment.rule = ta.at("rule").get<std::string>() == "argmax" ? TopicAssignment::Rule::ArgMax
                                                                     : TopicAssignment::Rule::AboveWeight;
    d.assignment.min_weight = ta.at("min_weight").get<double>();
  } catch (const IndexLoadError&) {
    throw;
  } catch (const std::exception& e) {
    throw IndexLoadError(std::string("malformed index file: ") + e.what());
  }
  std::sort(d.events.begin(), d.events.end(), [](const IndexedEvent& a, const IndexedEvent& b) { return a.id < b.id; });
  return d;
}

}  // namespace hisva

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "hisva/api.hpp"
#include "hisva/coherence.hpp"
#include "hisva/events.hpp"
#include "hisva/lda.hpp"
#include "hisva/pipeline.hpp"
#include "httplib.h"
#include "support.hpp"
#include "synthetic.hpp"

using namespace hisva;
using hisva::test::TempDir;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------- LDA

void lda_recovery(Check& c) {
  auto syn = hisva::test::make_synthetic_lda(2024, 200, 50);
  LdaParams p;
  p.num_topics = 2;
  p.seed = 17;
  auto t0 = Clock::now();
  auto a = fit_lda(syn.corpus, p);
  double secs = seconds_since(t0);
  auto b = fit_lda(syn.corpus, p);
  auto [c0, c1] = hisva::test::recovery(a.phi, syn.generators);
  c.detail << "cos=(" << c0 << ", " << c1 << ") fit=" << secs << "s; ";
  c.require(c0 >= 0.8 && c1 >= 0.8, "recovered topic cosine below 0.8");
  c.require(secs < 30.0, "fit slower than 30 s");
  c.require(a.phi == b.phi && a.theta == b.theta, "same-seed runs differ");
}

// ---------------------------------------------------------------- coherence

void coherence_oracle(Check& c) {
  auto micro = build_corpus_from_tokens({{"m", {"war", "army", "peace", "treaty", "war", "army", "trade", "peace"}}}).corpus;
  auto r = coherence_cv({{"war", "army", "peace"}, {"treaty", "trade", "war"}}, micro, 3);
  // frozen from tests/oracles/oracles.py
  const double expected = 0.32093415429531635;
  c.detail << "micro=" << r.value << " |err|=" << std::abs(r.value - expected) << "; ";
  c.require(r.windows == 6, "micro-corpus must have 6 windows");
  c.require(std::abs(r.value - expected) <= 1e-9, "micro-corpus C_V off by more than 1e-9");

  std::mt19937 rng(31337);
  double lo = 1.0, hi = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int V = 4 + static_cast<int>(rng() % 40);
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    for (int d = 0, D = 1 + static_cast<int>(rng() % 20); d < D; ++d) {
      std::vector<std::string> toks;
      for (int i = 0, n = 1 + static_cast<int>(rng() % 150); i < n; ++i) toks.push_back("w" + std::to_string(rng() % V));
      docs.emplace_back("d" + std::to_string(d), std::move(toks));
    }
    auto corpus = build_corpus_from_tokens(docs).corpus;
    std::vector<std::vector<std::string>> topics(1 + rng() % 5);
    for (auto& t : topics) {
      for (int i = 0; i < 10; ++i) t.push_back("w" + std::to_string(rng() % (V + 2)));
    }
    double v = coherence_cv(topics, corpus, 1 + rng() % 120).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    c.require(std::isfinite(v) && v >= -1.0 && v <= 1.0, "random-corpus C_V outside [-1, 1]");
  }
  c.detail << "random range=[" << lo << ", " << hi << "]; ";
}

// ---------------------------------------------------------------- PageRank

std::vector<double> dense_pagerank(int n, const std::vector<std::tuple<int, int, int>>& edges, double d) {
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  std::vector<double> out(n, 0.0);
  for (auto [s, t, w] : edges) {
    if (s == t) continue;
    M[t][s] += w;
    out[s] += w;
  }
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) M[t][s] = out[s] > 0 ? M[t][s] / out[s] : 1.0 / n;
  }
  std::vector<double> r(n, 1.0 / n), next(n);
  for (int it = 0; it < 5000; ++it) {
    for (int t = 0; t < n; ++t) {
      double acc = 0.0;
      for (int s = 0; s < n; ++s) acc += M[t][s] * r[s];
      next[t] = (1.0 - d) / n + d * acc;
    }
    double delta = 0.0;
    for (int i = 0; i < n; ++i) delta += std::abs(next[i] - r[i]);
    r.swap(next);
    if (delta < 1e-15) break;
  }
  double sum = 0.0;
  for (double v : r) sum += v;
  for (double& v : r) v /= sum;
  return r;
}

std::string node(int i) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "n%02d", i);
  return buf;
}

void pagerank_criterion(Check& c) {
  ClickstreamGraph cyc({"A", "B", "C"});
  cyc.add_edge("A", "B", 1);
  cyc.add_edge("B", "C", 1);
  cyc.add_edge("C", "A", 1);
  for (const auto& [id, v] : pagerank(cyc).scores) c.require(std::abs(v - 1.0 / 3.0) <= 1e-10, "3-cycle not uniform");

  std::mt19937 rng(4242);
  double worst = 0.0, worst_sum = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 50;
    std::set<std::string> nodes;
    for (int i = 0; i < n; ++i) nodes.insert(node(i));
    ClickstreamGraph g(nodes);
    std::vector<std::tuple<int, int, int>> edges;
    const int m = static_cast<int>(rng() % 300);
    for (int e = 0; e < m; ++e) {
      int s = static_cast<int>(rng() % n), t = static_cast<int>(rng() % n), w = 1 + static_cast<int>(rng() % 100);
      edges.emplace_back(s, t, w);
      g.add_edge(node(s), node(t), static_cast<std::uint64_t>(w));
    }
    auto pr = pagerank(g);
    auto oracle = dense_pagerank(n, edges, 0.85);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = pr.scores.at(node(i));
      sum += v;
      worst = std::max(worst, std::abs(v - oracle[i]));
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  c.detail << "max|pr-oracle|=" << worst << " max|sum-1|=" << worst_sum << "; ";
  c.require(worst <= 1e-8, "random graph differs from dense oracle by more than 1e-8");
  c.require(worst_sum <= 1e-8, "PageRank does not sum to 1 within 1e-8");
}

// ---------------------------------------------------------------- representatives

struct DateForm {
  std::string surface;
  DateValue value;
};

void representatives(Check& c) {
  const std::vector<DateForm> forms{
      {"March 1945", {1945, 3, {}}},          {"22 June 1941", {1941, 6, 22}}, {"1941-06-22", {1941, 6, 22}},
      {"June 22, 1941", {1941, 6, 22}},       {"1914", {1914, {}, {}}},      {"28 June 1914", {1914, 6, 28}},
      {"3 October 1935", {1935, 10, 3}},      {"October 1935", {1935, 10, {}}}, {"1945", {1945, {}, {}}},
      {"Aug. 1914", {1914, 8, {}}},           {"1066", {1066, {}, {}}},      {"6 June 1944", {1944, 6, 6}},
  };
  const std::vector<std::pair<std::string, std::string>> places{
      {"Germany", "DE"}, {"France", "FR"}, {"Poland", "PL"}, {"New York", "nyc"}, {"York", "york"}, {"Sarajevo", "sar"}};
  auto g = Gazetteer::parse(
      "DE\tGermany\t51\t10\tDE\t1\nFR\tFrance\t46\t2\tFR\t1\nPL\tPoland\t52\t19\tPL\t1\n"
      "nyc\tNew York\t40.7\t-74\tUS\t1\nyork\tYork\t53.9\t-1\tGB\t1\nsar\tSarajevo\t43.8\t18.4\tBA\t1\n");
  const std::vector<std::string> filler{"the", "army", "moved", "towards", "river", "and", "fought", "for", "days",
                                        "while", "troops", "waited", "near", "hills"};

  std::mt19937 rng(777);
  int agree = 0;
  const int N = 100;
  for (int a = 0; a < N; ++a) {
    std::string text;
    std::map<DateValue, Tally> dates;
    std::map<std::string, Tally> locs;
    const int segments = 5 + static_cast<int>(rng() % 40);
    for (int s = 0; s < segments; ++s) {
      for (int f = 0, nf = 1 + static_cast<int>(rng() % 4); f < nf; ++f) text += filler[rng() % filler.size()] + " ";
      if (rng() % 2) {
        // small pools make ties common
        const auto& d = forms[rng() % (3 + a % (forms.size() - 2))];
        auto [it, fresh] = dates.try_emplace(d.value, Tally{0, text.size()});
        ++it->second.count;
        text += d.surface;
      } else {
        const auto& p = places[rng() % (2 + a % (places.size() - 1))];
        auto [it, fresh] = locs.try_emplace(p.second, Tally{0, text.size()});
        ++it->second.count;
        text += p.first;
      }
      text += rng() % 3 ? " " : ". ";
    }
    auto brute = [](const auto& m) {
      using K = typename std::decay_t<decltype(m)>::key_type;
      std::optional<K> best;
      std::size_t bc = 0, bo = 0;
      for (const auto& [k, t] : m) {
        if (!best || t.count > bc || (t.count == bc && t.first_offset < bo)) {
          best = k;
          bc = t.count;
          bo = t.first_offset;
        }
      }
      return best;
    };
    Article art;
    art.id = "a" + std::to_string(a);
    art.title = art.id;
    art.text = text;
    auto rec = build_event_record(art, g);
    bool same = rec.representative_date == brute(dates) && rec.representative_location == brute(locs) &&
                rec.date_counts == dates && rec.location_counts == locs;
    if (same) ++agree;
  }
  c.detail << "agreement " << agree << "/" << N << "; ";
  c.require(agree == N, "representative anchors disagree with the brute-force recount");
}

// ---------------------------------------------------------------- fixture index

struct FixtureIndex {
  TempDir dir;
  Config cfg;
  IndexData data;
  json labels;
  FixtureIndex() {
    cfg = Config::load(hisva::test::stage_fixture(dir));
    run_ingest(cfg);
    run_extract(cfg);
    run_model(cfg);
    run_rank(cfg);
    run_index(cfg);
    data = load_index(cfg.index_path());
    labels = json::parse(hisva::test::read_file(dir / "labels.json"));
  }
};

FilterState random_filter(std::mt19937& rng, int num_topics) {
  FilterState f;
  if (rng() % 2) {
    int a = 1900 + static_cast<int>(rng() % 100), b = 1900 + static_cast<int>(rng() % 100);
    f.year_from = std::min(a, b);
    f.year_to = std::max(a, b);
  }
  switch (rng() % 3) {
    case 0: {
      std::uniform_real_distribution<double> la(-90, 90), lo(-180, 180);
      double s = la(rng), n = la(rng), w = lo(rng), e = lo(rng);
      f.region = BBox{std::min(s, n), std::min(w, e), std::max(s, n), std::max(w, e)};
      break;
    }
    case 1: {
      CountrySet cs;
      for (const char* cc : {"RS", "BG", "BA", "RO", "ME", "HU", "FR", "DE", "PL", "US", "GB", "RU"}) {
        if (rng() % 3 == 0) cs.insert(cc);
      }
      f.region = cs;
      break;
    }
    default:
      break;
  }
  if (rng() % 3 == 0) {
    std::set<int> vis;
    for (int k = 0; k < num_topics; ++k) {
      if (rng() % 2) vis.insert(k);
    }
    f.visible_topics = vis;
  }
  f.rec = rng() % 2 ? RecMode::Topic : RecMode::Popular;
  f.threshold = std::uniform_real_distribution<double>(0, 1)(rng);
  f.important_only = rng() % 4 == 0;
  return f;
}

void date_mode(Check& c, const FixtureIndex& fx) {
  std::mt19937 rng(99);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    FilterState f = i == 0 ? FilterState{} : random_filter(rng, fx.data.num_topics);
    std::optional<int> topic;
    if (i % 3 == 1) topic = static_cast<int>(rng() % fx.data.num_topics);
    f.date_mode = DateMode::Freq;
    double freq = timeline(fx.data.events, f, fx.data.scores, topic, fx.data.assignment).total();
    f.date_mode = DateMode::All;
    double all = timeline(fx.data.events, f, fx.data.scores, topic, fx.data.assignment).total();
    c.require(all >= freq, "ALL_DATE total below FREQ_DATE total");
    ++checked;
  }

  // contribution of the WWII-style event alone, by differencing the summary series
  const std::string wid = fx.labels["wwii_style"];
  std::vector<IndexedEvent> without;
  for (const auto& e : fx.data.events) {
    if (e.id != wid) without.push_back(e);
  }
  auto contribution = [&](DateMode mode) {
    FilterState f;
    f.date_mode = mode;
    auto with_ts = timeline(fx.data.events, f, fx.data.scores, std::nullopt, fx.data.assignment);
    auto without_ts = timeline(without, f, fx.data.scores, std::nullopt, fx.data.assignment);
    std::set<int> years;
    for (const auto& [y, v] : with_ts.bins) {
      double base = without_ts.bins.count(y) ? without_ts.bins.at(y) : 0.0;
      if (v - base > 0.5) years.insert(y);
    }
    return years;
  };
  auto freq_years = contribution(DateMode::Freq);
  auto all_years = contribution(DateMode::All);
  c.detail << checked << " filters; WWII-style FREQ years={";
  for (int y : freq_years) c.detail << y << ' ';
  c.detail << "} ALL years={";
  for (int y : all_years) c.detail << y << ' ';
  c.detail << "}; ";
  c.require(freq_years == std::set<int>{1945}, "WWII-style event not counted only at 1945 under FREQ_DATE");
  c.require(all_years == (std::set<int>{1935, 1941, 1945}), "WWII-style event not counted at 1935/1941/1945 under ALL_DATE");
}

// ---------------------------------------------------------------- clustering

std::vector<IndexedEvent> random_events(std::mt19937& rng, int n, int topics = 3) {
  std::uniform_real_distribution<double> la(-90, 90), lo(-180, 180);
  const char* ccs[] = {"RS", "BG", "FR", "DE", "US", "JP"};
  std::vector<IndexedEvent> evs;
  for (int i = 0; i < n; ++i) {
    int y = 1900 + static_cast<int>(rng() % 100);
    auto e = hisva::test::make_event("e" + std::to_string(i), y, la(rng), lo(rng), ccs[rng() % 6],
                                     static_cast<int>(rng() % topics), {y});
    // a share of events sits on common points, like cities
    if (rng() % 4 == 0) e.geo = GeoPoint{44.8, 20.4, "RS"};
    evs.push_back(std::move(e));
  }
  return evs;
}

ImportanceScores random_scores(std::mt19937& rng, const std::vector<IndexedEvent>& evs) {
  std::uniform_real_distribution<double> u(0, 1);
  std::map<std::string, double> pr, tc;
  for (const auto& e : evs) {
    pr[e.id] = u(rng);
    tc[e.id] = u(rng);
  }
  return make_importance(pr, tc);
}

void clustering(Check& c) {
  std::mt19937 rng(1000);
  auto evs = random_events(rng, 1000);
  auto scores = random_scores(rng, evs);
  ClusterOptions opts;
  std::size_t prev = 0;
  std::ostringstream counts;
  for (int z = opts.min_zoom; z <= opts.max_zoom; ++z) {
    auto markers = cluster_markers(evs, FilterState{}, scores, z, opts);
    std::size_t total = 0;
    std::set<std::string> seen;
    for (const auto& m : markers) {
      total += m.count;
      c.require(m.count == m.member_ids.size(), "marker count differs from member list");
      for (const auto& id : m.member_ids) seen.insert(id);
    }
    c.require(total == evs.size() && seen.size() == evs.size(), "markers do not partition the events");
    c.require(markers.size() >= prev, "marker count decreased with zoom");
    prev = markers.size();
    if (z % 3 == 0 || z == opts.max_zoom) counts << "z" << z << ":" << markers.size() << " ";
  }
  c.detail << "markers " << counts.str() << "; ";
}

// ---------------------------------------------------------------- dots

void dots(Check& c) {
  std::mt19937 rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    auto evs = random_events(rng, 10 + static_cast<int>(rng() % 60));
    auto scores = random_scores(rng, evs);
    FilterState f;
    f.rec = rng() % 2 ? RecMode::Topic : RecMode::Popular;
    f.threshold = std::uniform_real_distribution<double>(0, 1)(rng);
    const int topic = static_cast<int>(rng() % 3);
    const double window = std::uniform_real_distribution<double>(0, 6)(rng);
    auto ds = important_dots(evs, scores, f, topic, window);

    std::set<std::string> expected;
    std::map<std::string, int> year;
    for (const auto& e : evs) {
      year[e.id] = e.year();
      auto s = scores.score(e.id, f.rec);
      if (e.topic == topic && (f.threshold <= 0 || *s > f.threshold)) expected.insert(e.id);
    }
    std::set<std::string> got;
    std::size_t listed = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (const auto& id : ds[i].members) {
        got.insert(id);
        c.require(year[id] >= ds[i].start_year && year[id] <= ds[i].end_year, "member outside dot span");
      }
      listed += ds[i].members.size();
      c.require(ds[i].wide() == (ds[i].members.size() > 1), "wide flag inconsistent");
      if (i > 0) c.require(ds[i].start_year - ds[i - 1].end_year > window, "consecutive dots within merge window");
    }
    c.require(got == expected && listed == expected.size(), "dot members differ from important set");
  }
  std::vector<IndexedEvent> pair{hisva::test::make_event("Second_Balkan_War", 1913, 42, 23),
                                 hisva::test::make_event("Battle_of_Cer", 1914, 44.6, 19.5)};
  auto ds = important_dots(pair, make_importance({{"Second_Balkan_War", .5}, {"Battle_of_Cer", .5}},
                                                     {{"Second_Balkan_War", .5}, {"Battle_of_Cer", .5}}), FilterState{}, 0, 2.0);
  bool one_wide = ds.size() == 1 && ds[0].wide() && ds[0].members.size() == 2 && ds[0].start_year == 1913 &&
                  ds[0].end_year == 1914;
  c.require(one_wide, "1913/1914 with window 2 is not a single wide dot of 2");
  c.detail << "500 sets; 1913+1914 -> " << ds.size() << " dot(s) of " << (ds.empty() ? 0 : ds[0].members.size()) << "; ";
}

// ---------------------------------------------------------------- filters

FilterState tighten(std::mt19937& rng, FilterState f, int num_topics) {
  int lo = f.year_from.value_or(1800), hi = f.year_to.value_or(2100);
  if (rng() % 2) {
    int a = lo + static_cast<int>(rng() % (hi - lo + 1));
    int b = a + static_cast<int>(rng() % (hi - a + 1));
    f.year_from = a;
    f.year_to = b;
  }
  if (auto* box = std::get_if<BBox>(&f.region)) {
    std::uniform_real_distribution<double> u(0, 1);
    double s = box->south + u(rng) * (box->north - box->south);
    double n = s + u(rng) * (box->north - s);
    double w = box->west + u(rng) * (box->east - box->west);
    double e = w + u(rng) * (box->east - w);
    f.region = BBox{s, w, n, e};
  } else if (auto* cs = std::get_if<CountrySet>(&f.region)) {
    CountrySet sub;
    for (const auto& x : *cs) {
      if (rng() % 2) sub.insert(x);
    }
    f.region = sub;
  } else if (rng() % 2) {
    f.region = BBox{30, -20, 60, 40};
  }
  std::set<int> vis;
  if (f.visible_topics) {
    for (int k : *f.visible_topics) {
      if (rng() % 2) vis.insert(k);
    }
  } else {
    for (int k = 0; k < num_topics; ++k) {
      if (rng() % 2) vis.insert(k);
    }
  }
  f.visible_topics = vis;
  if (f.important_only || rng() % 2) {
    f.important_only = true;
    f.threshold = f.threshold + (1.0 - f.threshold) * std::uniform_real_distribution<double>(0, 1)(rng);
  }
  return f;
}

void filters(Check& c, const FixtureIndex& fx) {
  std::mt19937 rng(200);
  auto evs = random_events(rng, 400);
  auto scores = random_scores(rng, evs);
  for (int i = 0; i < 200; ++i) {
    const bool on_fixture = i % 2 == 0;
    const auto& events = on_fixture ? fx.data.events : evs;
    const auto& sc = on_fixture ? fx.data.scores : scores;
    const int K = on_fixture ? fx.data.num_topics : 3;
    FilterState loose = random_filter(rng, K);
    if (loose.important_only) loose.threshold *= 0.5;
    FilterState tight = tighten(rng, loose, K);
    tight.validate();
    auto a = filter_events(events, loose, sc);
    auto b = filter_events(events, tight, sc);
    bool subset = std::includes(a.begin(), a.end(), b.begin(), b.end());
    c.require(subset, "tighter filter returned an event the looser one excluded (pair " + std::to_string(i) + ")");
  }

  const auto& bal = fx.labels["balkans"];
  FilterState f;
  f.year_from = bal["years"][0];
  f.year_to = bal["years"][1];
  f.region = BBox{bal["bbox"][0], bal["bbox"][1], bal["bbox"][2], bal["bbox"][3]};
  auto picked = select_events(fx.data.events, f, fx.data.scores, fx.data.assignment);
  std::set<std::string> got;
  std::map<std::string, int> by_country;
  for (const auto* e : picked) {
    got.insert(e->id);
    ++by_country[e->geo->country_code];
  }
  c.detail << "200 nested pairs; Balkans " << got.size() << " events (";
  for (const auto& [cc, n] : by_country) c.detail << cc << ":" << n << " ";
  c.detail << "); ";
  c.require(got == bal["ids"].get<std::set<std::string>>(), "Balkans filter does not return the labeled set");
  c.require(by_country == bal["countries"].get<std::map<std::string, int>>(), "Balkans country breakdown differs");
}

// ---------------------------------------------------------------- end to end

struct SchemaValidator {
  json root;
  std::vector<std::string> errors;

  const json& resolve(const json& s) const {
    if (s.contains("$ref")) return root["definitions"][s["$ref"].get<std::string>()];
    return s;
  }
  static bool type_ok(const std::string& t, const json& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
  }
  void check(const json& schema_in, const json& v, const std::string& path) {
    const json& s = resolve(schema_in);
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok = ok || type_ok(t.get<std::string>(), v);
      } else {
        ok = type_ok(s["type"].get<std::string>(), v);
      }
      if (!ok) {
        errors.push_back(path + ": unexpected type " + std::string(v.type_name()));
        return;
      }
    }
    if (v.is_null()) return;
    if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end()) {
      errors.push_back(path + ": value not in enum");
    }
    if (v.is_number()) {
      double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>() - 1e-12) errors.push_back(path + ": below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>() + 1e-12) errors.push_back(path + ": above maximum");
    }
    if (s.value("format", "") == "iso-date" && v.is_string() && !DateValue::parse_iso(v.get<std::string>())) {
      errors.push_back(path + ": not an ISO date");
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& k : s["required"]) {
          if (!v.contains(k.get<std::string>())) errors.push_back(path + ": missing " + k.get<std::string>());
        }
      }
      if (s.contains("properties")) {
        for (const auto& [k, sub] : s["properties"].items()) {
          if (v.contains(k)) check(sub, v[k], path + "." + k);
        }
      }
    }
    if (v.is_array() && s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], path + "[" + std::to_string(i) + "]");
    }
  }
};

int run_cli(const std::vector<std::string>& args) {
  std::string cmd = std::string(HISVA_CLI);
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct ServeProcess {
  pid_t pid = -1;
  int port = -1;

  explicit ServeProcess(const std::string& config) {
    int fds[2];
    if (::pipe(fds) != 0) return;
    pid = ::fork();
    if (pid == 0) {
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      ::close(fds[1]);
      ::execl(HISVA_CLI, HISVA_CLI, "serve", "-c", config.c_str(), "--port", "0", static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(fds[1]);
    std::string line;
    char ch;
    while (::read(fds[0], &ch, 1) == 1 && ch != '\n') line += ch;
    ::close(fds[0]);
    auto colon = line.rfind(':');
    if (colon != std::string::npos) port = std::atoi(line.c_str() + colon + 1);
  }
  ~ServeProcess() { stop(); }
  int stop() {
    if (pid <= 0) return -1;
    ::kill(pid, SIGTERM);
    int status = 0;
    ::waitpid(pid, &status, 0);
    pid = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

void end_to_end(Check& c) {
  TempDir dir;
  auto config = hisva::test::stage_fixture(dir).string();
  SchemaValidator schema{json::parse(hisva::test::read_file(HISVA_SCHEMA)), {}};
  const auto& endpoints = schema.root["endpoints"];

  auto t0 = Clock::now();
  c.require(run_cli({"serve", "-c", config, "--port", "0"}) == 1, "serve started without an index");
  for (auto stage : {std::vector<std::string>{"ingest"}, {"extract"}, {"model", "--k-min", "3", "--k-max", "6", "--seed", "7"},
                     {"rank"}, {"index"}}) {
    auto args = stage;
    args.insert(args.begin() + 1, {"-c", config});
    c.require(run_cli(args) == 0, "stage " + stage[0] + " failed");
  }
  double pipeline_secs = seconds_since(t0);

  int payloads = 0;
  json note;
  {
    ServeProcess srv(config);
    c.require(srv.port > 0, "serve did not report a port");
    if (srv.port <= 0) return;
    httplib::Client cli("127.0.0.1", srv.port);
    const std::string balkans = "from=1910&to=1919&bbox=40,13,48,28.5";
    const std::vector<std::pair<std::string, std::string>> reads{
        {"GET /health", "/health"},
        {"GET /topics", "/topics"},
        {"GET /timeline", "/timeline"},
        {"GET /timeline", "/timeline?mode=all&normalized=true&topic=0&" + balkans},
        {"GET /timeline", "/timeline?countries=DE,FR&mode=freq"},
        {"GET /dots", "/dots"},
        {"GET /dots", "/dots?rec=popular&threshold=0.16&topic=1"},
        {"GET /clusters", "/clusters?zoom=0"},
        {"GET /clusters", "/clusters?zoom=3&" + balkans},
        {"GET /clusters", "/clusters?zoom=18"},
        {"GET /events", "/events?sort=importance&" + balkans},
        {"GET /events", "/events?sort=topic&important=true&threshold=0.3"},
        {"GET /article/{id}", "/article/Western_Allied_invasion_of_Germany"},
        {"GET /article/{id}", "/article/Cambridge_Five"},
        {"GET /related/{id}", "/related/Battle_of_Cer"},
        {"GET /related/{id}", "/related/Battle_of_Cer?rec=popular&k=5"},
        {"GET /search", "/search?q=balkan%20war"},
        {"GET /search", "/search?q="},
        {"GET /region-span", "/region-span?" + balkans},
        {"GET /notes", "/notes"},
    };
    for (const auto& [name, url] : reads) {
      auto res = cli.Get(url);
      c.require(res && res->status == 200, "request failed: " + url);
      if (!res || res->status != 200) continue;
      auto body = json::parse(res->body, nullptr, false);
      std::size_t before = schema.errors.size();
      schema.check(endpoints[name], body, url);
      c.require(schema.errors.size() == before, "schema violation at " + url + ": " +
                                                    (schema.errors.empty() ? "" : schema.errors.back()));
      ++payloads;
    }
    auto bad = cli.Get("/events?from=1920&to=1910");
    c.require(bad && bad->status == 400, "invalid filter not rejected");
    if (bad) schema.check(endpoints["error"], json::parse(bad->body), "error");

    auto created = cli.Post("/notes", R"({"article_id":"Battle_of_Cer","title":"Cer and Kolubara","keywords":["serbia"],"body":"first allied victory"})",
                            "application/json");
    c.require(created && created->status == 201, "note creation failed");
    if (created) {
      note = json::parse(created->body);
      schema.check(endpoints["POST /notes"], note, "POST /notes");
    }
    auto rejected = cli.Post("/notes", R"({"article_id":"Atlantis","title":"x"})", "application/json");
    c.require(rejected && rejected->status == 422, "note on unknown article not rejected");
    c.require(srv.stop() == 0, "serve did not exit cleanly");
  }
  {
    ServeProcess srv(config);
    httplib::Client cli("127.0.0.1", srv.port);
    auto res = cli.Get("/notes");
    bool survived = false;
    if (res && res->status == 200 && !note.is_null()) {
      auto notes = json::parse(res->body)["notes"];
      note.erase("api_version");
      survived = notes.size() == 1 && notes[0] == note;
    }
    c.require(survived, "note did not survive a restart");
  }
  double total = seconds_since(t0);
  c.detail << "pipeline " << pipeline_secs << "s, total " << total << "s, " << payloads << " payloads validated; ";
  c.require(total < 120.0, "end-to-end run slower than 2 min");
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&](const std::string& name, const std::function<void(Check&)>& fn) {
    Check c;
    auto t0 = Clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name << " :: " << c.detail.str() << "(" << seconds_since(t0) << "s)"
              << std::endl;
    if (!c.ok) ++failures;
  };

  std::unique_ptr<FixtureIndex> fx;
  try {
    fx = std::make_unique<FixtureIndex>();
  } catch (const std::exception& e) {
    std::cerr << "fixture pipeline failed: " << e.what() << '\n';
  }
  auto need_fixture = [&](const std::function<void(Check&, const FixtureIndex&)>& fn) {
    return [&fx, fn](Check& c) {
      c.require(fx != nullptr, "fixture index unavailable");
      if (fx) fn(c, *fx);
    };
  };

  run("lda_recovery", lda_recovery);
  run("coherence_oracle", coherence_oracle);
  run("pagerank", pagerank_criterion);
  run("representative_anchors", representatives);
  run("date_mode", need_fixture(date_mode));
  run("clustering_partition", clustering);
  run("dot_merging", dots);
  run("filter_anti_monotonicity", need_fixture(filters));
  run("end_to_end", end_to_end);

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}

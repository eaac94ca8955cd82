#include "hisva/corpus.hpp"

#include <fstream>

#include "json.hpp"

namespace hisva {

using nlohmann::json;

const Article* ArticleCollection::find(const std::string& id) const {
  auto it = articles.find(id);
  return it == articles.end() ? nullptr : &it->second;
}

void ArticleCollection::set_seeds(const std::set<std::string>& ids) {
  for (const auto& id : ids) {
    if (!articles.count(id)) throw std::invalid_argument("seed article not in snapshot: " + id);
  }
  seed_ids = ids;
}

namespace {

bool read_string_set(const json& obj, const char* key, std::set<std::string>& out,
                     std::string* why) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return true;
  if (!it->is_array()) {
    *why = std::string("field '") + key + "' is not an array";
    return false;
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      *why = std::string("field '") + key + "' holds a non-string";
      return false;
    }
    out.insert(v.get<std::string>());
  }
  return true;
}

}  // namespace

std::optional<Article> parse_article_record(const std::string& line, std::string* why) {
  std::string scratch;
  if (!why) why = &scratch;
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    *why = "not a JSON object";
    return std::nullopt;
  }
  Article a;
  auto id = obj.find("id");
  auto title = obj.find("title");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    *why = "missing or empty 'id'";
    return std::nullopt;
  }
  if (title == obj.end() || !title->is_string() || title->get<std::string>().empty()) {
    *why = "missing or empty 'title'";
    return std::nullopt;
  }
  a.id = id->get<std::string>();
  a.title = title->get<std::string>();
  if (auto text = obj.find("text"); text != obj.end() && !text->is_null()) {
    if (!text->is_string()) {
      *why = "field 'text' is not a string";
      return std::nullopt;
    }
    a.text = text->get<std::string>();
  }
  if (!read_string_set(obj, "categories", a.categories, why) ||
      !read_string_set(obj, "ontology_types", a.ontology_types, why) ||
      !read_string_set(obj, "links", a.link_targets, why)) {
    return std::nullopt;
  }
  if (auto th = obj.find("thumbnail"); th != obj.end() && th->is_string()) {
    a.thumbnail = th->get<std::string>();
  }
  return a;
}

LoadedArticles load_articles(const std::filesystem::path& snapshot_path) {
  std::ifstream in(snapshot_path);
  if (!in) throw SnapshotError("cannot open article snapshot: " + snapshot_path.string());

  LoadedArticles out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++out.report.lines_read;
    std::string why;
    auto article = parse_article_record(line, &why);
    if (!article) {
      ++out.report.skipped;
      out.report.warnings.push_back("line " + std::to_string(lineno) + ": " + why);
      continue;
    }
    std::string id = article->id;
    if (!out.collection.articles.emplace(id, std::move(*article)).second) {
      ++out.report.skipped;
      out.report.warnings.push_back("line " + std::to_string(lineno) + ": duplicate id '" + id + "'");
    }
  }
  return out;
}

std::set<std::string> select_event_articles(const ArticleCollection& coll,
                                            const SelectionOptions& opts) {
  if (coll.seed_ids.empty()) throw std::invalid_argument("seed set is empty");

  std::set<std::string> frontier;
  std::set<std::string> matched;
  for (const auto& seed : coll.seed_ids) {
    const Article* a = coll.find(seed);
    if (!a) throw std::invalid_argument("seed article not in collection: " + seed);
    frontier.insert(a->categories.begin(), a->categories.end());
    matched.insert(seed);
  }

  auto shares = [&](const Article& a) {
    for (const auto& c : a.categories) {
      if (frontier.count(c)) return true;
    }
    return false;
  };

  bool grew = true;
  while (grew) {
    grew = false;
    std::set<std::string> harvested;
    for (const auto& [id, a] : coll.articles) {
      if (matched.count(id) || !shares(a)) continue;
      matched.insert(id);
      harvested.insert(a.categories.begin(), a.categories.end());
    }
    if (!opts.transitive) break;
    for (const auto& c : harvested) grew |= frontier.insert(c).second;
  }

  std::set<std::string> selected;
  for (const auto& id : matched) {
    if (coll.articles.at(id).ontology_types.count(opts.event_type)) selected.insert(id);
  }
  return selected;
}

}  // namespace hisva

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hisva {

/// One article from the offline snapshot. Text is pre-rendered plain text.
struct Article {
  std::string id;
  std::string title;
  std::string text;
  std::set<std::string> categories;
  std::set<std::string> ontology_types;
  std::set<std::string> link_targets;
  std::optional<std::string> thumbnail;
};

struct ArticleCollection {
  std::map<std::string, Article> articles;
  std::set<std::string> seed_ids;

  const Article* find(const std::string& id) const;
  /// Replaces the seed set. Throws std::invalid_argument if any id does not
  /// resolve to a loaded article.
  void set_seeds(const std::set<std::string>& ids);
};

struct LoadReport {
  std::size_t lines_read = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

struct LoadedArticles {
  ArticleCollection collection;
  LoadReport report;
};

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses one snapshot record. Returns nullopt and fills `why` when the record
/// is malformed (bad JSON, missing id/title, wrong field types).
std::optional<Article> parse_article_record(const std::string& line, std::string* why);

/// Reads a line-delimited article snapshot. Blank lines are ignored; malformed
/// records and duplicate ids are skipped and reported. Throws SnapshotError
/// when the file cannot be opened.
LoadedArticles load_articles(const std::filesystem::path& snapshot_path);

struct SelectionOptions {
  /// When set, categories of every matched article are harvested as well and
  /// the expansion repeats until no new category appears.
  bool transitive = false;
  std::string event_type = "event";
};

/// Event-article working set: articles sharing a category with a seed (or
/// being a seed) that also carry the event ontology type. Throws
/// std::invalid_argument on an empty seed set.
std::set<std::string> select_event_articles(const ArticleCollection& coll,
                                            const SelectionOptions& opts = {});

}  // namespace hisva

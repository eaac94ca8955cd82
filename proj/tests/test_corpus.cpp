#include <gtest/gtest.h>

#include <random>

#include "hisva/corpus.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace hisva;
using hisva::test::TempDir;
using hisva::test::write_file;

namespace {

std::string record(const std::string& id, std::vector<std::string> cats, std::vector<std::string> types) {
  nlohmann::json j{{"id", id}, {"title", id}, {"text", "text of " + id}, {"categories", cats},
                   {"ontology_types", types}, {"links", nlohmann::json::array()}};
  return j.dump();
}

Article article(const std::string& id, std::set<std::string> cats, std::set<std::string> types) {
  Article a;
  a.id = id;
  a.title = id;
  a.categories = std::move(cats);
  a.ontology_types = std::move(types);
  return a;
}

ArticleCollection collection(std::vector<Article> arts, std::set<std::string> seeds) {
  ArticleCollection c;
  for (auto& a : arts) c.articles.emplace(a.id, a);
  c.set_seeds(seeds);
  return c;
}

}  // namespace

TEST(LoadArticles, EmptyFileYieldsNoArticles) {
  TempDir dir;
  write_file(dir / "a.jsonl", "");
  auto r = load_articles(dir / "a.jsonl");
  EXPECT_EQ(r.collection.articles.size(), 0u);
  EXPECT_TRUE(r.report.warnings.empty());
}

TEST(LoadArticles, FiveWellFormedLines) {
  TempDir dir;
  std::string body;
  for (int i = 0; i < 5; ++i) body += record("a" + std::to_string(i), {"C"}, {"event"}) + "\n";
  write_file(dir / "a.jsonl", body);
  auto r = load_articles(dir / "a.jsonl");
  EXPECT_EQ(r.collection.articles.size(), 5u);
  EXPECT_EQ(r.report.skipped, 0u);
}

TEST(LoadArticles, MalformedLineSkippedWithWarning) {
  TempDir dir;
  std::string body;
  for (int i = 0; i < 4; ++i) body += record("a" + std::to_string(i), {"C"}, {"event"}) + "\n";
  body.insert(body.find('\n') + 1, "{\"id\": \"broken\", \"title\": \n");
  write_file(dir / "a.jsonl", body);
  auto r = load_articles(dir / "a.jsonl");
  EXPECT_EQ(r.collection.articles.size(), 4u);
  EXPECT_EQ(r.report.skipped, 1u);
  ASSERT_EQ(r.report.warnings.size(), 1u);
  EXPECT_NE(r.report.warnings[0].find("line 2"), std::string::npos);
}

TEST(LoadArticles, WrongFieldTypesAndDuplicatesAreSkipped) {
  TempDir dir;
  std::string body = record("a", {"C"}, {"event"}) + "\n" + record("a", {"D"}, {"event"}) + "\n" +
                     R"({"id":"b","title":"B","categories":"notalist"})" + "\n" + R"({"title":"no id"})" +
                     "\n\n   \n" + R"([1,2,3])" + "\n";
  write_file(dir / "a.jsonl", body);
  auto r = load_articles(dir / "a.jsonl");
  EXPECT_EQ(r.collection.articles.size(), 1u);
  EXPECT_EQ(r.collection.articles.at("a").categories, std::set<std::string>{"C"});
  EXPECT_EQ(r.report.skipped, 4u);
}

TEST(LoadArticles, UnreadableFileIsFatal) {
  EXPECT_THROW(load_articles("/nonexistent/path/articles.jsonl"), SnapshotError);
}

TEST(LoadArticles, ThumbnailAndLinksParsed) {
  std::string why;
  auto a = parse_article_record(
      R"({"id":"x","title":"X","text":"t","categories":["c"],"ontology_types":["event"],"links":["y"],"thumbnail":"x.jpg"})",
      &why);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->thumbnail, "x.jpg");
  EXPECT_EQ(a->link_targets, std::set<std::string>{"y"});
}

TEST(SelectEvents, OneHopCategoryAndEventType) {
  auto c = collection({article("seed", {"WWI"}, {"war"}), article("a1", {"WWI"}, {"event"}),
                       article("a2", {"WWI"}, {"person"}), article("a3", {"WWII"}, {"event"})},
                      {"seed"});
  EXPECT_EQ(select_event_articles(c), std::set<std::string>{"a1"});
}

TEST(SelectEvents, SeedsWithoutCategoriesKeepOnlyEventTypedSeeds) {
  auto c = collection({article("s1", {}, {"event"}), article("s2", {}, {"person"}),
                       article("x", {"Other"}, {"event"})},
                      {"s1", "s2"});
  EXPECT_EQ(select_event_articles(c), std::set<std::string>{"s1"});
}

TEST(SelectEvents, EmptySeedSetIsAnError) {
  ArticleCollection c;
  c.articles.emplace("a", article("a", {"C"}, {"event"}));
  EXPECT_THROW(select_event_articles(c), std::invalid_argument);
}

TEST(SelectEvents, UnknownSeedRejected) {
  ArticleCollection c;
  EXPECT_THROW(c.set_seeds({"missing"}), std::invalid_argument);
}

TEST(SelectEvents, TransitiveFlagHarvestsFurtherCategories) {
  auto c = collection({article("seed", {"A"}, {"event"}), article("x", {"A", "B"}, {"event"}),
                       article("y", {"B", "C"}, {"event"}), article("z", {"C"}, {"event"}),
                       article("w", {"D"}, {"event"})},
                      {"seed"});
  EXPECT_EQ(select_event_articles(c), (std::set<std::string>{"seed", "x"}));
  SelectionOptions opts;
  opts.transitive = true;
  EXPECT_EQ(select_event_articles(c, opts), (std::set<std::string>{"seed", "x", "y", "z"}));
}

TEST(SelectEvents, MonotoneInSeedCategoriesAndAlwaysEventTyped) {
  std::mt19937 rng(11);
  const std::vector<std::string> cats{"a", "b", "c", "d", "e", "f", "g"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Article> arts;
    for (int i = 0; i < 30; ++i) {
      std::set<std::string> cs;
      for (const auto& cat : cats) {
        if (rng() % 4 == 0) cs.insert(cat);
      }
      arts.push_back(article("a" + std::to_string(i), cs, rng() % 2 ? std::set<std::string>{"event"}
                                                                     : std::set<std::string>{"person"}));
    }
    auto before = collection(arts, {"a0", "a1"});
    auto base = select_event_articles(before);
    for (const auto& id : base) EXPECT_TRUE(before.articles.at(id).ontology_types.count("event"));

    arts[0].categories.insert(cats[rng() % cats.size()]);
    auto after = select_event_articles(collection(arts, {"a0", "a1"}));
    for (const auto& id : base) EXPECT_TRUE(after.count(id)) << "trial " << trial;

    // insertion order of records must not matter
    std::shuffle(arts.begin(), arts.end(), rng);
    EXPECT_EQ(select_event_articles(collection(arts, {"a0", "a1"})), after);
  }
}

#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hisva/index.hpp"

namespace hisva::test {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(HISVA_FIXTURE_DIR); }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("hisva_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline IndexedEvent make_event(std::string id, int year, double lat, double lon, std::string cc = "XX",
                               int topic = 0, std::vector<int> years = {}) {
  IndexedEvent e;
  e.id = std::move(id);
  e.title = e.id;
  e.date = DateValue{year, std::nullopt, std::nullopt};
  if (years.empty()) years = {year};
  e.years = std::move(years);
  e.location_id = e.id + "_place";
  e.geo = GeoPoint{lat, lon, std::move(cc)};
  e.topic = topic;
  e.topic_weights = {1.0};
  e.topic_weight = 1.0;
  return e;
}

// Copies the end-to-end fixture into a scratch directory so stages can write artifacts.
inline fs::path stage_fixture(const TempDir& dir) {
  for (const char* f : {"articles.jsonl", "gazetteer.tsv", "clickstream.tsv", "config.json", "labels.json"}) {
    fs::copy_file(fixture_dir() / "e2e" / f, dir / f);
  }
  return dir / "config.json";
}

}  // namespace hisva::test

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hisva {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  std::string country_code;  // ISO-3166 alpha-2

  bool operator==(const GeoPoint&) const = default;
};

struct GazetteerRow {
  std::string id;
  std::string name;
  GeoPoint point;
  std::int64_t population = 0;
};

struct LocationMention {
  std::string surface;
  std::string gazetteer_id;
  std::size_t char_offset = 0;

  bool operator==(const LocationMention&) const = default;
};

class GazetteerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Offline place-name table. Several rows may share an id (name variants);
/// the first row of an id fixes its coordinates. When one name maps to several
/// ids the most populous place wins, then the smaller id.
class Gazetteer {
 public:
  Gazetteer() = default;

  /// Validates and adds a row; throws GazetteerError on out-of-range
  /// coordinates, a malformed country code, or an empty id/name.
  void add(GazetteerRow row);

  /// Tab-separated `id, name, lat, lon, country_code, population`. Lines that
  /// start with '#' and a leading `id\tname` header are skipped.
  static Gazetteer load(const std::filesystem::path& path);
  static Gazetteer parse(std::string_view tsv);

  std::optional<GeoPoint> geocode(const std::string& id) const;
  /// Id a surface name resolves to, after homonym priority.
  std::optional<std::string> resolve(const std::string& name) const;
  bool contains(const std::string& id) const { return places_.count(id) != 0; }
  std::size_t size() const { return places_.size(); }
  const std::string& display_name(const std::string& id) const;

  /// Case-sensitive, word-bounded, leftmost-longest scan. A match consumes its
  /// span, so shorter names inside it are never reported.
  std::vector<LocationMention> extract_locations(std::string_view text) const;

 private:
  struct Place {
    GeoPoint point;
    std::string name;
    std::int64_t population = 0;
  };
  struct Candidate {
    std::string id;
    std::int64_t population = 0;
  };

  std::map<std::string, Place> places_;
  std::map<std::string, Candidate> by_name_;
  // leading word of a name -> names starting with it, longest first
  std::unordered_map<std::string, std::vector<std::string>> by_first_word_;
};

inline std::vector<LocationMention> extract_locations(std::string_view text, const Gazetteer& g) {
  return g.extract_locations(text);
}

inline std::optional<GeoPoint> geocode(const std::string& id, const Gazetteer& g) {
  return g.geocode(id);
}

}  // namespace hisva

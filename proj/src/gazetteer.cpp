#include "hisva/gazetteer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hisva {

namespace {

bool word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

std::string_view leading_word(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && word_char(static_cast<unsigned char>(s[n]))) ++n;
  return s.substr(0, n);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

double parse_double(std::string_view s, const char* what) {
  std::string tmp(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    throw GazetteerError(std::string("bad ") + what + ": '" + tmp + "'");
  }
  if (used != tmp.size()) throw GazetteerError(std::string("bad ") + what + ": '" + tmp + "'");
  return v;
}

}  // namespace

void Gazetteer::add(GazetteerRow row) {
  if (row.id.empty() || row.name.empty()) throw GazetteerError("gazetteer row with empty id or name");
  if (!(row.point.lat >= -90.0 && row.point.lat <= 90.0)) {
    throw GazetteerError("latitude out of range for '" + row.id + "'");
  }
  if (!(row.point.lon >= -180.0 && row.point.lon <= 180.0)) {
    throw GazetteerError("longitude out of range for '" + row.id + "'");
  }
  const auto& cc = row.point.country_code;
  if (cc.size() != 2 || !std::isupper(static_cast<unsigned char>(cc[0])) ||
      !std::isupper(static_cast<unsigned char>(cc[1]))) {
    throw GazetteerError("bad country code '" + cc + "' for '" + row.id + "'");
  }
  auto first = leading_word(row.name);
  if (first.empty()) throw GazetteerError("name must start with a word character: '" + row.name + "'");

  auto [pit, fresh] = places_.try_emplace(row.id, Place{row.point, row.name, row.population});
  if (!fresh) pit->second.population = std::max(pit->second.population, row.population);

  auto [nit, new_name] = by_name_.try_emplace(row.name, Candidate{row.id, row.population});
  if (!new_name) {
    auto& cur = nit->second;
    if (row.population > cur.population || (row.population == cur.population && row.id < cur.id)) {
      cur = Candidate{row.id, row.population};
    }
    return;
  }
  auto& bucket = by_first_word_[std::string(first)];
  bucket.push_back(row.name);
  std::sort(bucket.begin(), bucket.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
}

Gazetteer Gazetteer::parse(std::string_view tsv) {
  Gazetteer g;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    auto nl = tsv.find('\n', pos);
    auto line = tsv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? tsv.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("id\tname", 0) == 0) continue;
    auto f = split_tabs(line);
    if (f.size() < 5 || f.size() > 6) {
      throw GazetteerError("gazetteer line " + std::to_string(lineno) + ": expected 6 fields");
    }
    GazetteerRow row;
    row.id = std::string(f[0]);
    row.name = std::string(f[1]);
    try {
      row.point.lat = parse_double(f[2], "latitude");
      row.point.lon = parse_double(f[3], "longitude");
      row.point.country_code = std::string(f[4]);
      if (f.size() == 6 && !f[5].empty()) {
        auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), row.population);
        if (ec != std::errc() || p != f[5].data() + f[5].size()) throw GazetteerError("bad population");
      }
      g.add(std::move(row));
    } catch (const GazetteerError& e) {
      throw GazetteerError("gazetteer line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GazetteerError("cannot open gazetteer: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<GeoPoint> Gazetteer::geocode(const std::string& id) const {
  auto it = places_.find(id);
  if (it == places_.end()) return std::nullopt;
  return it->second.point;
}

std::optional<std::string> Gazetteer::resolve(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second.id;
}

const std::string& Gazetteer::display_name(const std::string& id) const {
  static const std::string kEmpty;
  auto it = places_.find(id);
  return it == places_.end() ? kEmpty : it->second.name;
}

std::vector<LocationMention> Gazetteer::extract_locations(std::string_view text) const {
  std::vector<LocationMention> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!word_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    auto word = leading_word(text.substr(i));
    bool matched = false;
    if (auto it = by_first_word_.find(std::string(word)); it != by_first_word_.end()) {
      for (const auto& name : it->second) {
        if (text.compare(i, name.size(), name) != 0) continue;
        std::size_t end = i + name.size();
        if (end < n && word_char(static_cast<unsigned char>(text[end])) &&
            word_char(static_cast<unsigned char>(name.back()))) {
          continue;
        }
        out.push_back({name, by_name_.at(name).id, i});
        i = end;
        matched = true;
        break;
      }
    }
    if (!matched) i += word.size();
  }
  return out;
}

}  // namespace hisva

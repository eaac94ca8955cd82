#include "hisva/dates.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace hisva {

std::string DateValue::iso() const {
  char buf[16];
  if (month && day) {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, *month, *day);
  } else if (month) {
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, *month);
  } else {
    std::snprintf(buf, sizeof buf, "%04d", year);
  }
  return buf;
}

namespace {

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<DateValue> DateValue::parse_iso(std::string_view s) {
  DateValue v;
  auto y = to_int(s.substr(0, 4));
  if (s.size() < 4 || !y) return std::nullopt;
  v.year = *y;
  if (s.size() == 4) return v;
  if (s.size() < 7 || s[4] != '-') return std::nullopt;
  auto m = to_int(s.substr(5, 2));
  if (!m || *m < 1 || *m > 12) return std::nullopt;
  v.month = *m;
  if (s.size() == 7) return v;
  if (s.size() != 10 || s[7] != '-') return std::nullopt;
  auto d = to_int(s.substr(8, 2));
  if (!d || !is_valid_date(v.year, *m, *d)) return std::nullopt;
  v.day = *d;
  return v;
}

bool is_valid_date(int year, int month, int day) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12 || day < 1) return false;
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  int limit = kDays[month - 1] + (month == 2 && leap ? 1 : 0);
  return day <= limit;
}

namespace {

enum class TokKind { Word, Number, Other };

struct Tok {
  TokKind kind;
  std::size_t begin;
  std::size_t end;
};

bool is_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::vector<Tok> lex(std::string_view text) {
  std::vector<Tok> toks;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    TokKind kind = TokKind::Other;
    if (is_alpha(c)) {
      kind = TokKind::Word;
      while (j < n && is_alpha(static_cast<unsigned char>(text[j]))) ++j;
    } else if (is_digit(c)) {
      kind = TokKind::Number;
      while (j < n && is_digit(static_cast<unsigned char>(text[j]))) ++j;
    } else if (c >= 0x80) {
      // keep a multi-byte UTF-8 sequence (e.g. an en dash) as one token
      while (j < n && (static_cast<unsigned char>(text[j]) & 0xC0) == 0x80) ++j;
    }
    toks.push_back({kind, i, j});
    i = j;
  }
  return toks;
}

struct MonthName {
  std::string_view name;
  int month;
};

constexpr std::array<MonthName, 24> kMonths = {{
    {"January", 1},  {"February", 2}, {"March", 3},     {"April", 4},     {"May", 5},
    {"June", 6},     {"July", 7},     {"August", 8},    {"September", 9}, {"October", 10},
    {"November", 11}, {"December", 12}, {"Jan", 1},     {"Feb", 2},       {"Mar", 3},
    {"Apr", 4},      {"Jun", 6},      {"Jul", 7},       {"Aug", 8},       {"Sep", 9},
    {"Sept", 9},     {"Oct", 10},     {"Nov", 11},      {"Dec", 12},
}};

class Matcher {
 public:
  explicit Matcher(std::string_view text) : text_(text), toks_(lex(text)) {}

  std::vector<DateMention> run() {
    std::vector<DateMention> out;
    std::size_t i = 0;
    while (i < toks_.size()) {
      std::size_t next = i;
      std::optional<DateValue> v;
      if ((v = iso(i, next)) || (v = day_month_year(i, next)) || (v = month_day_year(i, next)) ||
          (v = month_year(i, next)) || (v = bare_year(i, next))) {
        out.push_back({*v, toks_[i].begin});
        i = next;
      } else {
        ++i;
      }
    }
    return out;
  }

 private:
  std::string_view str(std::size_t i) const {
    return text_.substr(toks_[i].begin, toks_[i].end - toks_[i].begin);
  }
  bool has(std::size_t i) const { return i < toks_.size(); }
  bool adjacent(std::size_t i) const {
    return has(i) && i > 0 && toks_[i - 1].end == toks_[i].begin;
  }
  bool spaced(std::size_t i) const { return has(i) && i > 0 && toks_[i - 1].end < toks_[i].begin; }
  bool punct(std::size_t i, char c) const {
    return has(i) && toks_[i].kind == TokKind::Other && str(i).size() == 1 && str(i)[0] == c;
  }
  std::optional<int> number(std::size_t i, std::size_t min_len, std::size_t max_len) const {
    if (!has(i) || toks_[i].kind != TokKind::Number) return std::nullopt;
    auto s = str(i);
    if (s.size() < min_len || s.size() > max_len) return std::nullopt;
    return to_int(s);
  }
  std::optional<int> year(std::size_t i) const {
    auto y = number(i, 4, 4);
    if (!y || *y < kMinYear || *y > kMaxYear) return std::nullopt;
    // a following letter glued to the digits ("1914th", "1914a") disqualifies
    if (has(i + 1) && adjacent(i + 1) && toks_[i + 1].kind == TokKind::Word) return std::nullopt;
    return y;
  }
  std::optional<int> month(std::size_t i) const {
    if (!has(i) || toks_[i].kind != TokKind::Word) return std::nullopt;
    auto s = str(i);
    for (const auto& m : kMonths) {
      if (m.name == s) return m.month;
    }
    return std::nullopt;
  }
  bool glued_before(std::size_t i) const {
    return adjacent(i) && toks_[i - 1].kind != TokKind::Other;
  }
  // Skips "." after an abbreviated month and an ordinal suffix after a day.
  std::size_t skip_dot(std::size_t i) const { return punct(i, '.') && adjacent(i) ? i + 1 : i; }
  std::size_t skip_ordinal(std::size_t i) const {
    if (!has(i) || !adjacent(i) || toks_[i].kind != TokKind::Word) return i;
    auto s = str(i);
    return (s == "st" || s == "nd" || s == "rd" || s == "th") ? i + 1 : i;
  }

  std::optional<DateValue> iso(std::size_t i, std::size_t& next) const {
    if (glued_before(i)) return std::nullopt;
    auto y = year(i);
    if (!y || !punct(i + 1, '-') || !adjacent(i + 1)) return std::nullopt;
    auto m = number(i + 2, 1, 2);
    if (!m || !adjacent(i + 2) || !punct(i + 3, '-') || !adjacent(i + 3)) return std::nullopt;
    auto d = number(i + 4, 1, 2);
    if (!d || !adjacent(i + 4) || !is_valid_date(*y, *m, *d)) return std::nullopt;
    if (has(i + 5) && adjacent(i + 5) && toks_[i + 5].kind != TokKind::Other) return std::nullopt;
    next = i + 5;
    return DateValue{*y, *m, *d};
  }

  std::optional<DateValue> day_month_year(std::size_t i, std::size_t& next) const {
    if (glued_before(i)) return std::nullopt;
    auto d = number(i, 1, 2);
    if (!d) return std::nullopt;
    std::size_t j = skip_ordinal(i + 1);
    auto m = month(j);
    if (!m || !spaced(j)) return std::nullopt;
    j = skip_dot(j + 1);
    auto y = year(j);
    if (!y || !spaced(j) || !is_valid_date(*y, *m, *d)) return std::nullopt;
    next = j + 1;
    return DateValue{*y, *m, *d};
  }

  std::optional<DateValue> month_day_year(std::size_t i, std::size_t& next) const {
    if (glued_before(i)) return std::nullopt;
    auto m = month(i);
    if (!m) return std::nullopt;
    std::size_t j = skip_dot(i + 1);
    auto d = number(j, 1, 2);
    if (!d || !spaced(j)) return std::nullopt;
    j = skip_ordinal(j + 1);
    if (punct(j, ',') && adjacent(j)) ++j;
    auto y = year(j);
    if (!y || !spaced(j) || !is_valid_date(*y, *m, *d)) return std::nullopt;
    next = j + 1;
    return DateValue{*y, *m, *d};
  }

  std::optional<DateValue> month_year(std::size_t i, std::size_t& next) const {
    if (glued_before(i)) return std::nullopt;
    auto m = month(i);
    if (!m) return std::nullopt;
    std::size_t j = skip_dot(i + 1);
    if (punct(j, ',') && adjacent(j)) ++j;
    auto y = year(j);
    if (!y || !spaced(j)) return std::nullopt;
    next = j + 1;
    return DateValue{*y, *m, std::nullopt};
  }

  std::optional<DateValue> bare_year(std::size_t i, std::size_t& next) const {
    if (glued_before(i)) return std::nullopt;
    auto y = year(i);
    if (!y) return std::nullopt;
    // part of a decimal or grouped number: "3.1415", "1,2000", "1914.5"
    auto separator = [&](std::size_t k) { return punct(k, '.') || punct(k, ','); };
    auto is_number = [&](std::size_t k) { return has(k) && toks_[k].kind == TokKind::Number; };
    if (i >= 2 && separator(i - 1) && adjacent(i) && adjacent(i - 1) && is_number(i - 2)) {
      return std::nullopt;
    }
    if (separator(i + 1) && adjacent(i + 1) && is_number(i + 2) && adjacent(i + 2)) {
      return std::nullopt;
    }
    next = i + 1;
    return DateValue{*y, std::nullopt, std::nullopt};
  }

  std::string_view text_;
  std::vector<Tok> toks_;
};

}  // namespace

std::vector<DateMention> extract_dates(std::string_view text) { return Matcher(text).run(); }

}  // namespace hisva

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hisva {

/// Calendar value of a date mention; month/day may be absent (year-only or
/// year-month precision). Ordering is chronological with missing parts first.
struct DateValue {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;

  auto operator<=>(const DateValue&) const = default;
  bool operator==(const DateValue&) const = default;

  /// "1914-06-28", "1945-03" or "1914".
  std::string iso() const;
  static std::optional<DateValue> parse_iso(std::string_view s);
};

struct DateMention {
  DateValue value;
  std::size_t char_offset = 0;

  bool operator==(const DateMention&) const = default;
};

bool is_valid_date(int year, int month, int day);

inline constexpr int kMinYear = 1000;
inline constexpr int kMaxYear = 2099;

/// Scans text for dates in document order. Recognized forms:
///   28 June 1914, 28th June 1914, June 28, 1914, June 1914, 1914-06-28,
///   and bare four-digit years in [kMinYear, kMaxYear].
/// Each year of a range such as "1914-1918" is reported separately.
std::vector<DateMention> extract_dates(std::string_view text);

}  // namespace hisva

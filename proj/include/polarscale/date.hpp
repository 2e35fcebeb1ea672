#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace polarscale {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
  std::int32_t days = 0;

  friend auto operator<=>(const Date&, const Date&) = default;
};

// Parses `YYYY-MM-DD`. Throws DataError on malformed or impossible dates.
Date parse_date(std::string_view text);
std::string format_date(Date date);
Date make_date(int year, unsigned month, unsigned day);

}  // namespace polarscale

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace privlens {

struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  auto operator<=>(const YearMonth&) const = default;

  int quarter() const { return (month - 1) / 3 + 1; }
  YearMonth next() const;
  YearMonth prev() const;
  // Months elapsed since year 0; handy for ranges and differences.
  int ordinal() const { return year * 12 + (month - 1); }
  static YearMonth from_ordinal(int ordinal);

  // "YYYY-MM"
  std::string to_string() const;
  static std::optional<YearMonth> parse(std::string_view text);
};

// UTC timestamp with one-second resolution, as used by the Wayback CDX index.
struct Timestamp {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;

  auto operator<=>(const Timestamp&) const = default;

  YearMonth year_month() const { return {year, month}; }

  // 14-digit "YYYYMMDDhhmmss".
  std::string to_cdx() const;
  // ISO-8601 "YYYY-MM-DDThh:mm:ssZ".
  std::string to_iso() const;

  // Accepts 4..14 leading digits (CDX allows truncated timestamps; missing
  // fields default to their minimum). Returns nullopt on malformed input or
  // out-of-range fields.
  static std::optional<Timestamp> parse_cdx(std::string_view digits);
  static std::optional<Timestamp> parse_iso(std::string_view text);
};

}  // namespace privlens

#include "privlens/dates.hpp"

#include <charconv>
#include <cstdio>

namespace privlens {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool valid(const Timestamp& t) {
  return t.year >= 1 && t.month >= 1 && t.month <= 12 && t.day >= 1 &&
         t.day <= days_in_month(t.year, t.month) && t.hour >= 0 && t.hour < 24 &&
         t.minute >= 0 && t.minute < 60 && t.second >= 0 && t.second < 61;
}

}  // namespace

YearMonth YearMonth::next() const { return from_ordinal(ordinal() + 1); }
YearMonth YearMonth::prev() const { return from_ordinal(ordinal() - 1); }

YearMonth YearMonth::from_ordinal(int ordinal) {
  return {ordinal / 12, ordinal % 12 + 1};
}

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  // "YYYY-MM" or "YYYYMM"
  YearMonth ym;
  if (text.size() == 7 && text[4] == '-') {
    if (!parse_int(text.substr(0, 4), ym.year) || !parse_int(text.substr(5, 2), ym.month))
      return std::nullopt;
  } else if (text.size() == 6) {
    if (!parse_int(text.substr(0, 4), ym.year) || !parse_int(text.substr(4, 2), ym.month))
      return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (ym.month < 1 || ym.month > 12) return std::nullopt;
  return ym;
}

std::string Timestamp::to_cdx() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d%02d%02d%02d", year, month, day, hour,
                minute, second);
  return buf;
}

std::string Timestamp::to_iso() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", year, month, day,
                hour, minute, second);
  return buf;
}

std::optional<Timestamp> Timestamp::parse_cdx(std::string_view digits) {
  if (digits.size() < 4 || digits.size() > 14 || digits.size() % 2 != 0) return std::nullopt;
  Timestamp t;
  int* fields[] = {&t.month, &t.day, &t.hour, &t.minute, &t.second};
  if (!parse_int(digits.substr(0, 4), t.year)) return std::nullopt;
  std::size_t pos = 4;
  for (int* f : fields) {
    if (pos >= digits.size()) break;
    if (!parse_int(digits.substr(pos, 2), *f)) return std::nullopt;
    pos += 2;
  }
  if (!valid(t)) return std::nullopt;
  return t;
}

std::optional<Timestamp> Timestamp::parse_iso(std::string_view text) {
  // YYYY-MM-DDThh:mm:ss[Z]
  if (text.size() < 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':')
    return std::nullopt;
  Timestamp t;
  if (!parse_int(text.substr(0, 4), t.year) || !parse_int(text.substr(5, 2), t.month) ||
      !parse_int(text.substr(8, 2), t.day) || !parse_int(text.substr(11, 2), t.hour) ||
      !parse_int(text.substr(14, 2), t.minute) || !parse_int(text.substr(17, 2), t.second))
    return std::nullopt;
  if (text.size() > 19 && text.substr(19) != "Z") return std::nullopt;
  if (!valid(t)) return std::nullopt;
  return t;
}

}  // namespace privlens

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace privlens::csv {

// RFC 4180: comma separated, fields optionally double-quoted with "" as an
// escaped quote; quoted fields may span lines. CRLF and LF both end a record.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Quotes only when needed.
std::string escape(std::string_view field);
std::string row(const std::vector<std::string>& fields);

}  // namespace privlens::csv

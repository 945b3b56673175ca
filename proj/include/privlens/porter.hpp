#pragma once

#include <string>
#include <string_view>

namespace privlens {

// The original (1980) Porter suffix-stripping algorithm, steps 1a through 5b,
// without the later departures (or the short-word guard) of the reference C
// release, so "us" -> "u". Expects a lowercase alphabetic word.
std::string porter_stem(std::string_view word);

}  // namespace privlens

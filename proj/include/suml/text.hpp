#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace suml {

// Lowercased word tokens: maximal runs of [a-z0-9_] (ASCII case-folded);
// bytes >= 0x80 are kept as word characters so multi-byte UTF-8 stays intact.
// Everything else (whitespace, punctuation) separates tokens.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace suml

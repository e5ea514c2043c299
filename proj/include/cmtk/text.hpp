#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 / Unicode primitives shared by the cleaning and graph modules.
// Everything here is a pure function; ICU state is thread-local.

namespace cmtk {

// Decodes UTF-8; invalid byte sequences become U+FFFD.
std::u32string decode_utf8(std::string_view utf8);

std::string encode_utf8(std::u32string_view cps);

// Full Unicode case folding of the whole string.
std::string case_fold(const std::string& utf8);

bool is_whitespace(char32_t cp);

// Extended grapheme clusters (UAX #29), each as a UTF-8 substring.
std::vector<std::string> graphemes(const std::string& utf8);

std::size_t grapheme_length(const std::string& utf8);

// First k grapheme clusters; the whole string when it has fewer than k.
std::string grapheme_prefix(const std::string& utf8, int k);

// Normalized indel similarity in [0,100] over code points:
//   100 * (1 - d/(|a|+|b|)), d = edit distance with insert/delete cost 1
// and substitution cost 2. Symmetric; 100 iff equal (nonempty operands);
// two empty strings score 100 by convention.
double similarity(std::u32string_view a, std::u32string_view b);
double similarity(const std::string& a, const std::string& b);

// The distance underlying similarity(). Exposed for reuse and testing.
int indel_distance(std::u32string_view a, std::u32string_view b);

}  // namespace cmtk

#include "cmtk/script.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cmtk/error.hpp"
#include "cmtk/text.hpp"

namespace cmtk {

std::string script_of(char32_t cp) {
  UErrorCode status = U_ZERO_ERROR;
  const UScriptCode code = uscript_getScript(static_cast<UChar32>(cp), &status);
  if (U_FAILURE(status) || code == USCRIPT_INVALID_CODE || code == USCRIPT_COMMON ||
      code == USCRIPT_INHERITED || code == USCRIPT_UNKNOWN) {
    return {};
  }
  const char* name = uscript_getName(code);
  if (name == nullptr) return {};
  std::string tag(name);
  std::transform(tag.begin(), tag.end(), tag.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return tag;
}

ScriptProfiles ScriptProfiles::builtin() {
  ScriptProfiles p;
  // Latin consonants: b-z minus vowels, both cases (words are usually
  // case-folded before counting, uppercase kept for robustness).
  std::vector<std::pair<char32_t, char32_t>> latin;
  for (const char* alphabet : {"bcdfghjklmnpqrstvwxyz", "BCDFGHJKLMNPQRSTVWXYZ"}) {
    for (const char* c = alphabet; *c; ++c) {
      latin.emplace_back(static_cast<char32_t>(*c), static_cast<char32_t>(*c));
    }
  }
  p.set_ranges("latin", std::move(latin));
  p.set_ranges("devanagari", {{0x0915, 0x0939}, {0x0958, 0x095F}});
  return p;
}

void ScriptProfiles::set_ranges(const std::string& script,
                                std::vector<std::pair<char32_t, char32_t>> ranges) {
  ranges_[script] = std::move(ranges);
}

namespace {

char32_t parse_hex_cp(const std::string& s, const std::filesystem::path& path, int line) {
  char32_t value = 0;
  if (s.empty()) throw ParseError(path.string() + ":" + std::to_string(line) + ": empty code point");
  for (char c : s) {
    int digit;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
    else
      throw ParseError(path.string() + ":" + std::to_string(line) + ": bad hex code point '" + s +
                       "'");
    value = value * 16 + static_cast<char32_t>(digit);
  }
  return value;
}

}  // namespace

void ScriptProfiles::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open script profile file: " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected `script<TAB>ranges`");
    }
    const std::string script = line.substr(0, tab);
    std::vector<std::pair<char32_t, char32_t>> ranges;
    std::stringstream rest(line.substr(tab + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      if (item.empty()) continue;
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        const char32_t cp = parse_hex_cp(item, path, line_no);
        ranges.emplace_back(cp, cp);
      } else {
        ranges.emplace_back(parse_hex_cp(item.substr(0, dash), path, line_no),
                            parse_hex_cp(item.substr(dash + 1), path, line_no));
      }
    }
    if (ranges.empty()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": no ranges for script '" +
                       script + "'");
    }
    set_ranges(script, std::move(ranges));
  }
}

bool ScriptProfiles::is_consonant(char32_t cp) const {
  if (!u_isalpha(static_cast<UChar32>(cp))) return false;
  std::string script = script_of(cp);
  auto it = ranges_.find(script);
  if (it == ranges_.end()) {
    if (!script.empty() && script != "latin" && warned_.insert(script).second) {
      std::cerr << "warning: no consonant profile for script '" << script
                << "', falling back to the Latin set\n";
    }
    it = ranges_.find("latin");
    if (it == ranges_.end()) return false;
  }
  // Fold single code point so uppercase Latin counts like lowercase.
  const UChar32 folded = u_foldCase(static_cast<UChar32>(cp), U_FOLD_CASE_DEFAULT);
  for (const auto& [lo, hi] : it->second) {
    if ((cp >= lo && cp <= hi) || (static_cast<char32_t>(folded) >= lo &&
                                   static_cast<char32_t>(folded) <= hi)) {
      return true;
    }
  }
  return false;
}

int ScriptProfiles::count_consonants(const std::string& word) const {
  int n = 0;
  for (const std::string& cluster : graphemes(word)) {
    const std::u32string cps = decode_utf8(cluster);
    if (!cps.empty() && is_consonant(cps.front())) ++n;
  }
  return n;
}

}  // namespace cmtk

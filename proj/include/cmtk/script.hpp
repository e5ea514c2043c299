#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cmtk {

// Per-script consonant code-point sets, used by the word filters.
// The built-in profiles cover Latin and Devanagari; more scripts can be
// loaded from a TSV of `script_tag<TAB>codepoint_range_list` rows where
// ranges are hex, e.g. `bengali<TAB>0995-09B9,09DC-09DF`.
class ScriptProfiles {
 public:
  static ScriptProfiles builtin();

  void load_tsv(const std::filesystem::path& path);

  // Adds or replaces the consonant ranges for one script tag.
  void set_ranges(const std::string& script, std::vector<std::pair<char32_t, char32_t>> ranges);

  bool has(const std::string& script) const { return ranges_.count(script) > 0; }

  // Number of graphemes whose base code point is a consonant under the
  // profile of that code point's script. Letters from scripts without a
  // profile fall back to the Latin set and a one-shot warning on stderr.
  int count_consonants(const std::string& word) const;

 private:
  bool is_consonant(char32_t cp) const;

  std::map<std::string, std::vector<std::pair<char32_t, char32_t>>> ranges_;
  mutable std::set<std::string> warned_;
};

// Lowercased ICU script name ("latin", "devanagari", ...) of a code point;
// empty for code points with no script (digits, punctuation).
std::string script_of(char32_t cp);

}  // namespace cmtk

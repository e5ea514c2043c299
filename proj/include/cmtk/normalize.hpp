#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cmtk/corpus.hpp"

namespace cmtk {

enum class UnicodeForm { NFC, NFKC };

// Grapheme-sequence replacement table standing in for an external
// transliteration engine. Applied greedy longest-match left-to-right.
struct TransliterationTable {
  // Kept sorted by (source length desc, source asc) for deterministic
  // longest-match application.
  std::vector<std::pair<std::u32string, std::u32string>> entries;
  std::string source_script;
  std::string target_script;

  bool empty() const { return entries.empty(); }

  // TSV rows `source<TAB>target`, `#` comments. The directives
  // `#source_script=x` / `#target_script=y` fill the script tags.
  static TransliterationTable load(const std::filesystem::path& path);

  // The identity hook: no entries, every character passes through.
  static TransliterationTable identity();

  void add(const std::string& source, const std::string& target);
  void canonicalize();
};

struct CleaningConfig {
  UnicodeForm unicode_form = UnicodeForm::NFKC;
  // ASCII punctuation/symbols except apostrophe and hyphen by default.
  std::set<char32_t> special_chars;
  int collapse_threshold = 2;
  std::optional<TransliterationTable> transliteration;  // nullopt = off

  static std::set<char32_t> default_special_chars();
  static CleaningConfig defaults();
};

std::string normalize_unicode(const std::string& text, UnicodeForm form);

std::string strip_special_chars(const std::string& text, const CleaningConfig& config);

// Removes emoji-presentation code points, emoji modifiers, variation
// selectors FE0E/FE0F, and ZWJs that glue emoji sequences together. ZWJs
// between ordinary letters (meaningful in Indic scripts) survive.
std::string strip_emoji(const std::string& text);

// Every maximal run of one code point longer than `threshold` collapses to
// a single occurrence; shorter runs are untouched.
std::string collapse_runs(const std::string& text, int threshold);

std::string transliterate(const std::string& text, const TransliterationTable& table);

// The full pipeline: unicode normalization, special-char removal, emoji
// removal, run collapsing, transliteration (when configured), then
// whitespace tidy-up (runs to single spaces, ends trimmed).
std::string clean(const std::string& text, const CleaningConfig& config);

Corpus clean_corpus(const Corpus& corpus, const CleaningConfig& config);

}  // namespace cmtk

#include "cmtk/normalize.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "cmtk/error.hpp"
#include "cmtk/text.hpp"

namespace cmtk {

namespace {

const icu::Normalizer2* normalizer_for(UnicodeForm form) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = form == UnicodeForm::NFC
                                  ? icu::Normalizer2::getNFCInstance(status)
                                  : icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU normalizer unavailable");
  }
  return n;
}

bool is_emoji_core(char32_t cp) {
  const auto c = static_cast<UChar32>(cp);
  return u_hasBinaryProperty(c, UCHAR_EMOJI_PRESENTATION) ||
         u_hasBinaryProperty(c, UCHAR_EMOJI_MODIFIER);
}

}  // namespace

std::string normalize_unicode(const std::string& text, UnicodeForm form) {
  const icu::Normalizer2* n = normalizer_for(form);
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString normalized =
      n->normalize(icu::UnicodeString::fromUTF8(text), status);
  if (U_FAILURE(status)) {
    throw ParseError(std::string("unicode normalization failed: ") + u_errorName(status));
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::set<char32_t> CleaningConfig::default_special_chars() {
  std::set<char32_t> chars;
  const auto add_range = [&](char lo, char hi) {
    for (char c = lo; c <= hi; ++c) chars.insert(static_cast<char32_t>(c));
  };
  add_range('!', '/');
  add_range(':', '@');
  add_range('[', '`');
  add_range('{', '~');
  chars.erase(U'\'');  // apostrophes carry meaning in many languages
  chars.erase(U'-');   // keep intra-word hyphens
  return chars;
}

CleaningConfig CleaningConfig::defaults() {
  CleaningConfig config;
  config.special_chars = default_special_chars();
  return config;
}

std::string strip_special_chars(const std::string& text, const CleaningConfig& config) {
  const std::u32string cps = decode_utf8(text);
  std::u32string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (!config.special_chars.count(cp)) out.push_back(cp);
  }
  return encode_utf8(out);
}

std::string strip_emoji(const std::string& text) {
  const std::u32string cps = decode_utf8(text);
  std::vector<bool> remove(cps.size(), false);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    remove[i] = is_emoji_core(cps[i]) || cps[i] == U'︎' || cps[i] == U'️';
  }
  // ZWJs stitching removed code points together go with them; two sweeps
  // so chains like EMOJI ZWJ EMOJI ZWJ EMOJI dissolve completely.
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (cps[i] != U'‍' || remove[i]) continue;
      const bool prev_removed = i > 0 && remove[i - 1];
      const bool next_removed = i + 1 < cps.size() && remove[i + 1];
      if (prev_removed || next_removed) remove[i] = true;
    }
  }
  std::u32string out;
  out.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!remove[i]) out.push_back(cps[i]);
  }
  return encode_utf8(out);
}

std::string collapse_runs(const std::string& text, int threshold) {
  if (threshold < 2) throw ConfigError("collapse threshold must be >= 2");
  const std::u32string cps = decode_utf8(text);
  std::u32string out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t j = i;
    while (j < cps.size() && cps[j] == cps[i]) ++j;
    const std::size_t run = j - i;
    const std::size_t keep = run > static_cast<std::size_t>(threshold) ? 1 : run;
    out.append(keep, cps[i]);
    i = j;
  }
  return encode_utf8(out);
}

void TransliterationTable::add(const std::string& source, const std::string& target) {
  const std::u32string src = decode_utf8(source);
  if (src.empty()) throw ConfigError("transliteration entry with empty source side");
  entries.emplace_back(src, decode_utf8(target));
}

void TransliterationTable::canonicalize() {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                entries.end());
}

TransliterationTable TransliterationTable::identity() { return {}; }

TransliterationTable TransliterationTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open transliteration table: " + path.string());
  TransliterationTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#source_script=", 0) == 0) {
        table.source_script = line.substr(15);
      } else if (line.rfind("#target_script=", 0) == 0) {
        table.target_script = line.substr(15);
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected `source<TAB>target`");
    }
    const std::string source = line.substr(0, tab);
    if (source.empty()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty source side");
    }
    table.add(source, line.substr(tab + 1));
  }
  table.canonicalize();
  return table;
}

std::string transliterate(const std::string& text, const TransliterationTable& table) {
  if (table.empty()) return text;
  const std::u32string cps = decode_utf8(text);
  std::u32string out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    bool matched = false;
    for (const auto& [src, dst] : table.entries) {  // longest sources first
      if (src.size() <= cps.size() - i &&
          std::equal(src.begin(), src.end(), cps.begin() + static_cast<std::ptrdiff_t>(i))) {
        out += dst;
        i += src.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      out.push_back(cps[i]);
      ++i;
    }
  }
  return encode_utf8(out);
}

namespace {

std::string normalize_whitespace(const std::string& text) {
  const std::u32string cps = decode_utf8(text);
  std::u32string out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(cp);
  }
  return encode_utf8(out);
}

}  // namespace

std::string clean(const std::string& text, const CleaningConfig& config) {
  std::string s = normalize_unicode(text, config.unicode_form);
  s = strip_special_chars(s, config);
  s = strip_emoji(s);
  s = collapse_runs(s, config.collapse_threshold);
  if (config.transliteration.has_value()) s = transliterate(s, *config.transliteration);
  return normalize_whitespace(s);
}

Corpus clean_corpus(const Corpus& corpus, const CleaningConfig& config) {
  Corpus out = corpus;
  for (Comment& c : out.comments) c.text = clean(c.text, config);
  return out;
}

}  // namespace cmtk

#include "cmtk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "cmtk/error.hpp"
#include "cmtk/text.hpp"

namespace cmtk {

namespace {

constexpr const char kConsonants[] = "bdgkmnprstvz";
constexpr const char kVowels[] = "aeiou";
constexpr const char kAlphabet[] = "abdegikmnoprstuvz";

// Bounded draw with a pinned sequence; std::uniform_int_distribution's
// mapping is implementation-defined.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

double draw_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

char draw_char(std::mt19937_64& rng, const char* set, std::size_t len) {
  return set[draw(rng, len)];
}

// Pronounceable CVC-prefixed word with dense consonants.
std::string make_word(std::mt19937_64& rng, int length) {
  std::string w;
  w.push_back(draw_char(rng, kConsonants, sizeof(kConsonants) - 1));
  w.push_back(draw_char(rng, kVowels, sizeof(kVowels) - 1));
  w.push_back(draw_char(rng, kConsonants, sizeof(kConsonants) - 1));
  while (static_cast<int>(w.size()) < length) {
    w.push_back(draw_char(rng, kConsonants, sizeof(kConsonants) - 1));
    if (static_cast<int>(w.size()) < length) {
      w.push_back(draw_char(rng, kVowels, sizeof(kVowels) - 1));
    }
  }
  return w;
}

const std::vector<std::string>& decoration_emoji() {
  static const std::vector<std::string> emoji = {"\U0001F600", "\U0001F525", "\U0001F602",
                                                 "\U0001F64F"};
  return emoji;
}

// Distorts a token in a way the cleaning pipeline undoes: an elongation of
// a letter that occurs singly, attached emoji, or punctuation bursts.
std::string decorate(const std::string& token, std::mt19937_64& rng) {
  switch (draw(rng, 3)) {
    case 0: {  // elongate a singleton letter to a 3-run
      std::vector<std::size_t> singles;
      for (std::size_t i = 0; i < token.size(); ++i) {
        const bool left_same = i > 0 && token[i - 1] == token[i];
        const bool right_same = i + 1 < token.size() && token[i + 1] == token[i];
        if (!left_same && !right_same && static_cast<unsigned char>(token[i]) < 0x80) {
          singles.push_back(i);
        }
      }
      if (singles.empty()) return token;
      const std::size_t at = singles[draw(rng, singles.size())];
      std::string out = token;
      out.insert(at, 2, token[at]);
      return out;
    }
    case 1: {  // attached emoji
      const auto& emoji = decoration_emoji();
      return token + emoji[draw(rng, emoji.size())];
    }
    default: {  // punctuation burst
      static const std::vector<std::string> bursts = {"!!!", "@", "#", "...", "??"};
      const std::string& b = bursts[draw(rng, bursts.size())];
      return draw(rng, 2) == 0 ? token + b : b + token;
    }
  }
}

}  // namespace

std::string random_post_prefix_edit(const std::string& word, SyntheticSpec::EditKind kind,
                                    std::mt19937_64& rng) {
  if (word.size() < 4) throw ConfigError("word too short for a post-prefix edit: " + word);
  bool insert;
  switch (kind) {
    case SyntheticSpec::EditKind::Insert: insert = true; break;
    case SyntheticSpec::EditKind::Substitute: insert = false; break;
    default: insert = draw(rng, 2) == 0; break;
  }
  std::string out = word;
  if (insert) {
    const std::size_t pos = 3 + draw(rng, word.size() - 2);  // [3, size]
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos),
               draw_char(rng, kAlphabet, sizeof(kAlphabet) - 1));
  } else {
    const std::size_t pos = 3 + draw(rng, word.size() - 3);  // [3, size-1]
    char replacement = out[pos];
    while (replacement == out[pos]) {
      replacement = draw_char(rng, kAlphabet, sizeof(kAlphabet) - 1);
    }
    out[pos] = replacement;
  }
  return out;
}

TransliterationTable synthetic_native_table() {
  TransliterationTable table;
  table.source_script = "latin";
  table.target_script = "devanagari";
  // Consonants b..z onto a consecutive Devanagari consonant run, vowels
  // onto independent vowel letters; bijective by construction.
  char32_t next_consonant = 0x0915;
  const std::string vowels = "aeiou";
  const char32_t vowel_targets[] = {0x0905, 0x090F, 0x0907, 0x0913, 0x0909};
  for (char c = 'a'; c <= 'z'; ++c) {
    const auto v = vowels.find(c);
    char32_t target;
    if (v != std::string::npos) {
      target = vowel_targets[v];
    } else {
      target = next_consonant++;
    }
    table.add(std::string(1, c), encode_utf8(std::u32string(1, target)));
  }
  table.canonicalize();
  return table;
}

TransliterationTable synthetic_english_table() {
  const TransliterationTable native = synthetic_native_table();
  TransliterationTable inverse;
  inverse.source_script = native.target_script;
  inverse.target_script = native.source_script;
  for (const auto& [src, dst] : native.entries) {
    inverse.entries.emplace_back(dst, src);
  }
  inverse.canonicalize();
  return inverse;
}

SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_base_words < 1) throw ConfigError("n_base_words must be >= 1");
  if (spec.variants_per_word < 0) throw ConfigError("variants_per_word must be >= 0");
  if (spec.edit_ops_per_variant < 1) throw ConfigError("edit_ops_per_variant must be >= 1");
  if (spec.n_comments < 1) throw ConfigError("n_comments must be >= 1");
  if (spec.abusive_ratio < 0.0 || spec.abusive_ratio > 1.0) {
    throw ConfigError("abusive_ratio must be in [0,1]");
  }
  if (spec.base_word_min_length < 4) throw ConfigError("base words need length >= 4");
  if (spec.script != "latin" && spec.script != "devanagari") {
    throw ConfigError("unsupported synthetic script: " + spec.script);
  }
  if (spec.min_words < 1 || spec.max_words < spec.min_words) {
    throw ConfigError("need 1 <= min_words <= max_words");
  }
  if (spec.background_vocab < 1) throw ConfigError("background_vocab must be >= 1");

  std::mt19937_64 rng(spec.seed);
  SyntheticResult result;

  // Base words with pairwise-distinct first-3 prefixes.
  std::set<std::string> used_prefixes;
  std::set<std::string> all_forms;
  while (static_cast<int>(result.base_words.size()) < spec.n_base_words) {
    const int length = spec.base_word_min_length + static_cast<int>(draw(rng, 3));
    std::string w = make_word(rng, length);
    if (!used_prefixes.insert(w.substr(0, 3)).second) continue;
    result.base_words.push_back(w);
    all_forms.insert(w);
  }

  // Variants by repeated post-prefix edits, distinct across all groups.
  int within = 0;
  int total_variants = 0;
  for (const std::string& base : result.base_words) {
    auto& list = result.variants[base];
    int attempts = 0;
    while (static_cast<int>(list.size()) < spec.variants_per_word) {
      if (++attempts > 200 * std::max(1, spec.variants_per_word)) {
        throw ConfigError("infeasible synthetic spec: cannot produce " +
                          std::to_string(spec.variants_per_word) +
                          " distinct variants within the edit budget for '" + base + "'");
      }
      std::string v = base;
      for (int e = 0; e < spec.edit_ops_per_variant; ++e) {
        v = random_post_prefix_edit(v, spec.edit_kind, rng);
      }
      if (!all_forms.insert(v).second) continue;
      list.push_back(v);
      result.groups.push_back({base, v});
      ++total_variants;
      if (similarity(base, v) >= 85.0) ++within;
    }
  }
  result.within_threshold_fraction =
      total_variants == 0 ? 1.0 : static_cast<double>(within) / total_variants;

  // Neutral background vocabulary, kept out of the planted prefix space.
  std::vector<std::string> background;
  while (static_cast<int>(background.size()) < spec.background_vocab) {
    std::string w = make_word(rng, 4 + static_cast<int>(draw(rng, 7)));
    if (used_prefixes.count(w.substr(0, 3)) || all_forms.count(w)) continue;
    background.push_back(w);
  }

  // Mention schedule: per-base cycle of [canon, canon, v1, ..., vk],
  // shuffled, so every form's abusive frequency is controlled exactly.
  const int n_abusive = static_cast<int>(std::lround(spec.abusive_ratio * spec.n_comments));
  std::vector<std::pair<int, int>> schedule;  // (base index, form: -1 = canonical)
  {
    std::vector<std::vector<int>> cycles(static_cast<std::size_t>(spec.n_base_words));
    const double vr = std::clamp(spec.variant_rate, 1e-9, 1.0);
    const int canonical_repeats = std::max(
        2, static_cast<int>(std::lround(spec.variants_per_word * (1.0 - vr) / vr)));
    for (std::size_t b = 0; b < cycles.size(); ++b) {
      for (int i = 0; i < canonical_repeats; ++i) cycles[b].push_back(-1);
      for (int v = 0; v < spec.variants_per_word; ++v) cycles[b].push_back(v);
    }
    std::vector<std::size_t> cursor(cycles.size(), 0);
    for (int i = 0; i < n_abusive; ++i) {
      const auto b = static_cast<std::size_t>(i % spec.n_base_words);
      schedule.emplace_back(static_cast<int>(b),
                            cycles[b][cursor[b] % cycles[b].size()]);
      ++cursor[b];
    }
    for (std::size_t i = schedule.size(); i > 1; --i) {
      std::swap(schedule[i - 1], schedule[draw(rng, i)]);
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(spec.n_comments), 0);
  for (int i = 0; i < n_abusive; ++i) labels[static_cast<std::size_t>(i)] = 1;
  for (std::size_t i = labels.size(); i > 1; --i) {
    std::swap(labels[i - 1], labels[draw(rng, i)]);
  }

  const TransliterationTable native = synthetic_native_table();
  const bool base_is_latin = spec.script == "latin";

  int post_counter = 0;
  int comments_in_post = 0;
  int post_capacity = 1;
  int next_mention = 0;
  for (int i = 0; i < spec.n_comments; ++i) {
    if (comments_in_post >= post_capacity) {
      ++post_counter;
      comments_in_post = 0;
      post_capacity = 1 + static_cast<int>(draw(rng, 5));
    }
    ++comments_in_post;

    const int label = labels[static_cast<std::size_t>(i)];
    const int n_words =
        spec.min_words + static_cast<int>(draw(
                             rng, static_cast<std::size_t>(spec.max_words - spec.min_words + 1)));
    std::vector<std::string> words;
    words.reserve(static_cast<std::size_t>(n_words) + 1);
    for (int k = 0; k < n_words; ++k) {
      words.push_back(background[draw(rng, background.size())]);
    }
    if (label == 1 && draw_real(rng) >= spec.mentionless_abusive_rate) {
      const auto [base_ix, form] = schedule[static_cast<std::size_t>(next_mention++)];
      const std::string& base = result.base_words[static_cast<std::size_t>(base_ix)];
      std::string mention =
          form < 0 ? base : result.variants.at(base)[static_cast<std::size_t>(form)];
      if (draw_real(rng) < spec.fresh_typo_rate) {
        mention = random_post_prefix_edit(mention, spec.edit_kind, rng);
      }
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(draw(rng, words.size() + 1)),
                   std::move(mention));
    }
    for (std::string& w : words) {
      if (draw_real(rng) < spec.decoration_rate) w = decorate(w, rng);
    }
    std::string text;
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (k > 0) text.push_back(' ');
      text += words[k];
    }
    const bool switch_script = draw_real(rng) < spec.translit_rate;
    if (switch_script) text = transliterate(text, native);

    Comment c;
    char id[16];
    std::snprintf(id, sizeof(id), "c%06d", i + 1);
    c.comment_id = id;
    std::snprintf(id, sizeof(id), "p%06d", post_counter);
    c.post_id = id;
    c.text = std::move(text);
    c.language = base_is_latin && !switch_script ? "hi-Latn" : "hi";
    c.comment_likes = static_cast<std::int64_t>(draw(rng, 50));
    c.comment_reports = static_cast<std::int64_t>(draw(rng, label == 1 ? 10 : 3));
    c.post_likes = static_cast<std::int64_t>(draw(rng, 1000));
    c.post_reports = static_cast<std::int64_t>(draw(rng, 20));
    c.label = label;
    result.corpus.comments.push_back(std::move(c));
  }

  if (spec.script == "devanagari") {
    for (Comment& c : result.corpus.comments) c.text = transliterate(c.text, native);
    for (std::string& w : result.base_words) w = transliterate(w, native);
    std::map<std::string, std::vector<std::string>> moved;
    for (auto& [base, list] : result.variants) {
      std::vector<std::string> vs;
      for (const std::string& v : list) vs.push_back(transliterate(v, native));
      moved[transliterate(base, native)] = std::move(vs);
    }
    result.variants = std::move(moved);
    for (GroundTruthRow& row : result.groups) {
      row.base = transliterate(row.base, native);
      row.variant = transliterate(row.variant, native);
    }
  }
  return result;
}

void write_groups_tsv(const std::vector<GroundTruthRow>& rows,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open groups file for writing: " + path.string());
  for (const GroundTruthRow& row : rows) out << row.base << '\t' << row.variant << '\n';
  if (!out) throw Error("failed writing groups file: " + path.string());
}

std::vector<GroundTruthRow> read_groups_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open groups file: " + path.string());
  std::vector<GroundTruthRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected `base<TAB>variant`");
    }
    rows.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return rows;
}

}  // namespace cmtk

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cmtk/corpus.hpp"
#include "cmtk/normalize.hpp"

namespace cmtk {

// Desk-scale labeled corpus with planted "abusive" word groups: each group
// is a canonical base word plus noisy variants produced by post-prefix
// edits. Texts optionally carry decorations (emoji, punctuation bursts,
// elongations) and a fraction of comments is rendered in a second script
// through the synthetic transliteration table.
struct SyntheticSpec {
  int n_base_words = 10;
  int variants_per_word = 4;
  int edit_ops_per_variant = 1;
  int n_comments = 2000;
  double abusive_ratio = 0.5;
  std::string script = "latin";
  std::uint64_t seed = 1;

  enum class EditKind { Insert, Substitute, Mixed };
  // Inserted letters keep all group members pairwise similar; substitutions
  // at differing positions drop pairwise similarity below the gate.
  EditKind edit_kind = EditKind::Insert;

  double variant_rate = 0.6;      // abusive mention rendered as a variant
  double decoration_rate = 0.25;  // per-token decoration probability
  double translit_rate = 0.0;     // whole-comment second-script probability
  // Share of mentions further mangled by one fresh post-prefix edit,
  // producing misspellings never listed in the ground-truth groups.
  double fresh_typo_rate = 0.0;
  // Share of abusive comments carrying no planted mention at all; these
  // stay abusive by label but give the classifier nothing to key on.
  double mentionless_abusive_rate = 0.0;
  int background_vocab = 150;
  int min_words = 3;
  int max_words = 9;
  int base_word_min_length = 8;
};

struct GroundTruthRow {
  std::string base;
  std::string variant;
};

struct SyntheticResult {
  Corpus corpus;
  std::vector<std::string> base_words;
  std::map<std::string, std::vector<std::string>> variants;  // base -> variants
  std::vector<GroundTruthRow> groups;
  // Fraction of planted variants whose similarity to their base clears the
  // default similarity threshold (85).
  double within_threshold_fraction = 0.0;
};

SyntheticResult generate_synthetic(const SyntheticSpec& spec);

// One random edit (insert or substitute) strictly after the first three
// characters, so the prefix gate keeps holding.
std::string random_post_prefix_edit(const std::string& word, SyntheticSpec::EditKind kind,
                                    std::mt19937_64& rng);

// 1:1 Latin -> Devanagari letter table (and its inverse); being a bijection
// it preserves lengths, prefixes and similarity scores across scripts.
TransliterationTable synthetic_native_table();
TransliterationTable synthetic_english_table();

void write_groups_tsv(const std::vector<GroundTruthRow>& rows,
                      const std::filesystem::path& path);
std::vector<GroundTruthRow> read_groups_tsv(const std::filesystem::path& path);

}  // namespace cmtk

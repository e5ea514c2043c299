#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cmtk {

// One labeled social-media comment with its engagement metadata.
struct Comment {
  std::string comment_id;
  std::string post_id;
  std::string text;
  std::string language;
  std::int64_t comment_likes = 0;
  std::int64_t comment_reports = 0;
  std::int64_t post_likes = 0;
  std::int64_t post_reports = 0;
  int label = 0;  // 0 = non-abusive, 1 = abusive

  bool operator==(const Comment&) const = default;
};

struct Corpus {
  std::vector<Comment> comments;

  std::size_t size() const { return comments.size(); }
  bool empty() const { return comments.empty(); }
};

enum class CorpusFormat { Csv, Jsonl };

// Picks Csv for .csv, Jsonl for .jsonl/.json; anything else is a ConfigError.
CorpusFormat format_from_extension(const std::filesystem::path& path);

// Loads a corpus. CSV expects the canonical nine-column header (any column
// order); JSONL expects one object per line with the same field names.
// Unknown extra columns are ignored with a warning on stderr. Malformed
// rows, bad labels, negative counts and duplicate comment ids are rejected
// with the offending line number.
Corpus ingest(const std::filesystem::path& path, CorpusFormat format);
Corpus ingest(const std::filesystem::path& path);

void write_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Replaces every comment's post-level counters with the maximum observed in
// its post_id group. Comment-level counters are untouched. Idempotent.
Corpus aggregate_post_metadata(const Corpus& corpus);

// Deterministic stratified split. Strata are labels, or label x language
// when by_language is set. Per stratum the validation set takes
// floor(fraction * stratum size) comments; the remainder stays in train.
// Both halves keep the original corpus order.
std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, double validation_fraction,
                                           std::uint64_t seed, bool by_language = false);

}  // namespace cmtk

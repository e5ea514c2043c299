#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cmtk/cluster.hpp"
#include "cmtk/corpus.hpp"

namespace cmtk {

struct CorrectionOutcome {
  std::string original;
  std::string corrected;
  std::optional<std::string> matched_parent;
  double score = 0.0;  // best association score seen, 0 with no candidates
};

struct AuditRow {
  std::string original;
  std::string corrected;
  std::string parent;
  double score = 0.0;
};

// Immutable inference wrapper around a CorrectionModel; clusters are
// indexed by parent prefix so lookups touch only same-prefix candidates.
class Corrector {
 public:
  explicit Corrector(CorrectionModel model);

  const CorrectionModel& model() const { return model_; }

  // Candidates are clusters whose parent shares the word's first-k
  // graphemes; a cluster's association score is its best anchor
  // similarity. The highest-scoring cluster wins when its score reaches
  // the model threshold (ties: higher parent frequency, then smaller
  // parent). Words shorter than k graphemes pass through.
  CorrectionOutcome correct_word(const std::string& word) const;

  // Tokenizes, corrects each token, rejoins with single spaces. Changed
  // tokens are appended to `audit` when provided.
  std::string correct_text(const std::string& text, std::vector<AuditRow>* audit = nullptr) const;

  Corpus correct_corpus(const Corpus& corpus, std::vector<AuditRow>* audit = nullptr) const;

 private:
  CorrectionModel model_;
  std::unordered_map<std::string, std::vector<int>> by_prefix_;
};

void write_audit(const std::vector<AuditRow>& rows, const std::filesystem::path& path);

}  // namespace cmtk

#include "cmtk/correct.hpp"

#include <fstream>
#include <sstream>

#include "cmtk/error.hpp"
#include "cmtk/text.hpp"
#include "cmtk/wordgraph.hpp"

namespace cmtk {

Corrector::Corrector(CorrectionModel model) : model_(std::move(model)) {
  for (std::size_t i = 0; i < model_.clusters.size(); ++i) {
    by_prefix_[model_.clusters[i].prefix].push_back(static_cast<int>(i));
  }
}

CorrectionOutcome Corrector::correct_word(const std::string& word) const {
  CorrectionOutcome outcome;
  outcome.original = word;
  outcome.corrected = word;
  if (word.empty()) return outcome;

  const int k = model_.config.prefix_len;
  if (grapheme_length(word) < static_cast<std::size_t>(k)) return outcome;

  const auto bucket = by_prefix_.find(grapheme_prefix(word, k));
  if (bucket == by_prefix_.end()) return outcome;

  const std::u32string decoded = decode_utf8(word);
  const Cluster* best = nullptr;
  double best_score = 0.0;
  for (int cluster_id : bucket->second) {
    const Cluster& cluster = model_.clusters[static_cast<std::size_t>(cluster_id)];
    double score = 0.0;
    for (const AnchorWord& anchor : cluster.anchors) {
      score = std::max(score, similarity(decoded, decode_utf8(anchor.word)));
    }
    const bool wins =
        best == nullptr || score > best_score ||
        (score == best_score && (cluster.parent_frequency > best->parent_frequency ||
                                 (cluster.parent_frequency == best->parent_frequency &&
                                  cluster.parent < best->parent)));
    if (wins) {
      best = &cluster;
      best_score = score;
    }
  }
  if (best == nullptr) return outcome;

  outcome.score = best_score;
  if (best_score >= model_.config.similarity_threshold) {
    outcome.corrected = best->parent;
    outcome.matched_parent = best->parent;
  }
  return outcome;
}

std::string Corrector::correct_text(const std::string& text, std::vector<AuditRow>* audit) const {
  std::string out;
  bool first = true;
  for (const std::string& token : tokenize(text)) {
    const CorrectionOutcome outcome = correct_word(token);
    if (audit != nullptr && outcome.corrected != outcome.original) {
      audit->push_back({outcome.original, outcome.corrected, outcome.matched_parent.value_or(""),
                        outcome.score});
    }
    if (!first) out.push_back(' ');
    out += outcome.corrected;
    first = false;
  }
  return out;
}

Corpus Corrector::correct_corpus(const Corpus& corpus, std::vector<AuditRow>* audit) const {
  Corpus out = corpus;
  for (Comment& c : out.comments) c.text = correct_text(c.text, audit);
  return out;
}

void write_audit(const std::vector<AuditRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open audit file for writing: " + path.string());
  out << "original\tcorrected\tparent\tscore\n";
  std::ostringstream line;
  for (const AuditRow& row : rows) {
    line.str("");
    line << row.original << '\t' << row.corrected << '\t' << row.parent << '\t' << row.score;
    out << line.str() << '\n';
  }
  if (!out) throw Error("failed writing audit file: " + path.string());
}

}  // namespace cmtk

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmtk/corpus.hpp"
#include "cmtk/normalize.hpp"
#include "cmtk/script.hpp"
#include "cmtk/wordgraph.hpp"

namespace cmtk {

struct Vocabulary {
  std::vector<std::string> terms;  // unique, sorted
  std::vector<std::int64_t> document_frequency;
  int ngram_low = 1;
  int ngram_high = 2;

  std::unordered_map<std::string, int> index;  // term -> position, derived

  void rebuild_index();
  std::size_t size() const { return terms.size(); }
};

struct ClassifierConfig {
  int ngram_low = 1;
  int ngram_high = 2;
  std::int64_t min_df = 2;
  double l2 = 1e-4;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-6;
  double decision_threshold = 0.5;
};

struct ClassifierModel {
  static constexpr const char* kFormatVersion = "1";

  std::string version = kFormatVersion;
  Vocabulary vocabulary;
  std::vector<double> idf;
  std::vector<double> nb_log_ratio;
  std::vector<double> weights;
  double bias = 0.0;
  double decision_threshold = 0.5;
};

struct EvalReport {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct Prediction {
  double probability = 0.0;
  int label = 0;
};

struct TrainDiagnostics {
  std::vector<double> losses;
  bool converged = false;
  int iterations = 0;
};

// Sparse (term index, value) pairs sorted by index.
using SparseVec = std::vector<std::pair<int, double>>;

// Word n-grams of the tokenized text, joined by single spaces.
std::vector<std::string> extract_ngrams(const std::string& text, int ngram_low, int ngram_high);

// Terms with document frequency >= min_df, lexicographic order. Throws
// when nothing survives the df filter.
Vocabulary fit_vocabulary(const Corpus& corpus, int ngram_low, int ngram_high,
                          std::int64_t min_df);

// idf_t = ln((1+N)/(1+df_t)) + 1
std::vector<double> compute_idf(const Vocabulary& vocabulary, std::int64_t n_documents);

// L2-normalized tf*idf over in-vocabulary terms; all-OOV text gives an
// empty (zero) vector.
SparseVec tfidf_vector(const std::string& text, const Vocabulary& vocabulary,
                       const std::vector<double>& idf);
SparseVec tfidf_vector(const std::string& text, const ClassifierModel& model);

// r_t = ln((p_t/|p|_1)/(q_t/|q|_1)) with p/q the alpha-smoothed per-class
// tf-idf mass sums (alpha = 1). Throws on a single-class corpus.
std::vector<double> nb_log_ratios(const Corpus& corpus, const Vocabulary& vocabulary);

// Logistic regression on tfidf (element-wise *) nb_log_ratio features,
// full-batch gradient descent with backtracking line search. Deterministic.
ClassifierModel train(const Corpus& corpus, const ClassifierConfig& config,
                      TrainDiagnostics* diagnostics = nullptr);

Prediction predict(const std::string& text, const ClassifierModel& model);

EvalReport report_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn);

// Positive class is abusive (label 1); set `macro` for macro-averaged F1
// over both classes.
EvalReport evaluate(const ClassifierModel& model, const Corpus& corpus, bool macro = false);

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Ablation harness: the four cumulative pipeline variants (plus an optional
// English-transliteration variant) trained and evaluated on one fixed split.

struct AblationConfig {
  CleaningConfig cleaning;  // transliteration slot ignored; tables below
  std::optional<TransliterationTable> native_table;
  std::optional<TransliterationTable> english_table;  // adds the fifth row
  GraphConfig graph;
  ClassifierConfig classifier;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  bool stratify_by_language = false;
};

struct AblationRow {
  std::string name;
  EvalReport report;
};

std::vector<AblationRow> run_ablation(const Corpus& raw, const AblationConfig& config,
                                      const ScriptProfiles& profiles);

void write_ablation_tsv(const std::vector<AblationRow>& rows, const std::filesystem::path& path);
std::string format_ablation_table(const std::vector<AblationRow>& rows);

}  // namespace cmtk

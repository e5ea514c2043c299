#include "cmtk/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cmtk/cluster.hpp"
#include "cmtk/correct.hpp"
#include "cmtk/error.hpp"

namespace cmtk {

void Vocabulary::rebuild_index() {
  index.clear();
  index.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) index[terms[i]] = static_cast<int>(i);
}

std::vector<std::string> extract_ngrams(const std::string& text, int ngram_low, int ngram_high) {
  const std::vector<std::string> tokens = tokenize(text);
  std::vector<std::string> ngrams;
  for (int n = ngram_low; n <= ngram_high; ++n) {
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (int j = 1; j < n; ++j) {
        gram.push_back(' ');
        gram += tokens[i + static_cast<std::size_t>(j)];
      }
      ngrams.push_back(std::move(gram));
    }
  }
  return ngrams;
}

Vocabulary fit_vocabulary(const Corpus& corpus, int ngram_low, int ngram_high,
                          std::int64_t min_df) {
  if (corpus.empty()) throw ConfigError("fit_vocabulary: empty corpus");
  if (ngram_low < 1 || ngram_high < ngram_low) {
    throw ConfigError("fit_vocabulary: bad n-gram range");
  }
  std::map<std::string, std::int64_t> df;
  std::vector<std::string> ngrams;
  for (const Comment& c : corpus.comments) {
    ngrams = extract_ngrams(c.text, ngram_low, ngram_high);
    std::sort(ngrams.begin(), ngrams.end());
    ngrams.erase(std::unique(ngrams.begin(), ngrams.end()), ngrams.end());
    for (const std::string& g : ngrams) df[g] += 1;
  }
  Vocabulary vocab;
  vocab.ngram_low = ngram_low;
  vocab.ngram_high = ngram_high;
  for (const auto& [term, count] : df) {
    if (count >= min_df) {
      vocab.terms.push_back(term);
      vocab.document_frequency.push_back(count);
    }
  }
  if (vocab.terms.empty()) {
    throw Error("fit_vocabulary: no term reaches min_df=" + std::to_string(min_df));
  }
  vocab.rebuild_index();
  return vocab;
}

std::vector<double> compute_idf(const Vocabulary& vocabulary, std::int64_t n_documents) {
  std::vector<double> idf(vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    idf[i] = std::log(static_cast<double>(1 + n_documents) /
                      static_cast<double>(1 + vocabulary.document_frequency[i])) +
             1.0;
  }
  return idf;
}

SparseVec tfidf_vector(const std::string& text, const Vocabulary& vocabulary,
                       const std::vector<double>& idf) {
  std::map<int, double> weights;
  for (const std::string& gram : extract_ngrams(text, vocabulary.ngram_low, vocabulary.ngram_high)) {
    const auto it = vocabulary.index.find(gram);
    if (it != vocabulary.index.end()) weights[it->second] += 1.0;
  }
  SparseVec vec;
  vec.reserve(weights.size());
  double norm_sq = 0.0;
  for (auto& [term, tf] : weights) {
    const double w = tf * idf[static_cast<std::size_t>(term)];
    vec.emplace_back(term, w);
    norm_sq += w * w;
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [term, w] : vec) w *= inv;
  }
  return vec;
}

SparseVec tfidf_vector(const std::string& text, const ClassifierModel& model) {
  return tfidf_vector(text, model.vocabulary, model.idf);
}

std::vector<double> nb_log_ratios(const Corpus& corpus, const Vocabulary& vocabulary) {
  bool has_pos = false;
  bool has_neg = false;
  for (const Comment& c : corpus.comments) (c.label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw Error("nb_log_ratios: corpus must contain both classes");
  }

  const std::vector<double> idf = compute_idf(vocabulary, static_cast<std::int64_t>(corpus.size()));
  constexpr double kAlpha = 1.0;
  std::vector<double> pos(vocabulary.size(), kAlpha);
  std::vector<double> neg(vocabulary.size(), kAlpha);
  for (const Comment& c : corpus.comments) {
    auto& mass = c.label == 1 ? pos : neg;
    for (const auto& [term, w] : tfidf_vector(c.text, vocabulary, idf)) {
      mass[static_cast<std::size_t>(term)] += w;
    }
  }
  double pos_norm = 0.0;
  double neg_norm = 0.0;
  for (double v : pos) pos_norm += v;
  for (double v : neg) neg_norm += v;

  std::vector<double> r(vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    r[i] = std::log((pos[i] / pos_norm) / (neg[i] / neg_norm));
  }
  return r;
}

namespace {

double softplus(double x) { return x > 35.0 ? x : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Features {
  std::vector<SparseVec> docs;
  std::vector<int> labels;  // +1 / -1
};

double loss_at(const Features& feats, const std::vector<double>& w, double b, double l2) {
  double total = 0.0;
  for (std::size_t d = 0; d < feats.docs.size(); ++d) {
    double z = b;
    for (const auto& [term, v] : feats.docs[d]) z += w[static_cast<std::size_t>(term)] * v;
    total += softplus(-static_cast<double>(feats.labels[d]) * z);
  }
  total /= static_cast<double>(feats.docs.size());
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return total + 0.5 * l2 * reg;
}

}  // namespace

ClassifierModel train(const Corpus& corpus, const ClassifierConfig& config,
                      TrainDiagnostics* diagnostics) {
  bool has_pos = false;
  bool has_neg = false;
  for (const Comment& c : corpus.comments) (c.label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw Error("train: corpus must contain both classes");
  }

  ClassifierModel model;
  model.vocabulary = fit_vocabulary(corpus, config.ngram_low, config.ngram_high, config.min_df);
  model.idf = compute_idf(model.vocabulary, static_cast<std::int64_t>(corpus.size()));
  model.nb_log_ratio = nb_log_ratios(corpus, model.vocabulary);
  model.decision_threshold = config.decision_threshold;

  // x_d = tfidf ⊙ r
  Features feats;
  feats.docs.reserve(corpus.size());
  feats.labels.reserve(corpus.size());
  for (const Comment& c : corpus.comments) {
    SparseVec x = tfidf_vector(c.text, model.vocabulary, model.idf);
    for (auto& [term, v] : x) v *= model.nb_log_ratio[static_cast<std::size_t>(term)];
    feats.docs.push_back(std::move(x));
    feats.labels.push_back(c.label == 1 ? 1 : -1);
  }

  const std::size_t dim = model.vocabulary.size();
  const double n = static_cast<double>(feats.docs.size());
  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<double> grad(dim);
  std::vector<double> w_trial(dim);

  double loss = loss_at(feats, w, b, config.l2);
  TrainDiagnostics diag;
  diag.losses.push_back(loss);

  double step = 1.0;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t d = 0; d < feats.docs.size(); ++d) {
      double z = b;
      for (const auto& [term, v] : feats.docs[d]) z += w[static_cast<std::size_t>(term)] * v;
      const double residual = sigmoid(z) - (feats.labels[d] == 1 ? 1.0 : 0.0);
      for (const auto& [term, v] : feats.docs[d]) {
        grad[static_cast<std::size_t>(term)] += residual * v;
      }
      grad_b += residual;
    }
    double grad_norm_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      grad[i] = grad[i] / n + config.l2 * w[i];
      grad_norm_sq += grad[i] * grad[i];
    }
    grad_b /= n;
    grad_norm_sq += grad_b * grad_b;

    diag.iterations = iter;
    if (std::sqrt(grad_norm_sq) <= config.gradient_tolerance) {
      diag.converged = true;
      break;
    }

    // Backtracking line search (Armijo, c = 1e-4).
    step = std::min(step * 2.0, 1e4);
    double trial_loss = 0.0;
    double b_trial = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < dim; ++i) w_trial[i] = w[i] - step * grad[i];
      b_trial = b - step * grad_b;
      trial_loss = loss_at(feats, w_trial, b_trial, config.l2);
      if (trial_loss <= loss - 1e-4 * step * grad_norm_sq || step < 1e-12) break;
      step *= 0.5;
    }
    if (trial_loss > loss) break;  // step collapsed without improvement
    w.swap(w_trial);
    b = b_trial;
    loss = trial_loss;
    diag.losses.push_back(loss);
    diag.iterations = iter + 1;
  }
  if (!diag.converged) {
    std::cerr << "warning: logistic regression stopped after " << diag.iterations
              << " iterations without reaching gradient tolerance\n";
  }
  if (diagnostics != nullptr) *diagnostics = diag;

  model.weights = std::move(w);
  model.bias = b;
  return model;
}

Prediction predict(const std::string& text, const ClassifierModel& model) {
  double z = model.bias;
  for (const auto& [term, v] : tfidf_vector(text, model)) {
    z += model.weights[static_cast<std::size_t>(term)] *
         model.nb_log_ratio[static_cast<std::size_t>(term)] * v;
  }
  Prediction p;
  p.probability = sigmoid(z);
  p.label = p.probability >= model.decision_threshold ? 1 : 0;
  return p;
}

EvalReport report_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                                      : 0.0;
  return r;
}

EvalReport evaluate(const ClassifierModel& model, const Corpus& corpus, bool macro) {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const Comment& c : corpus.comments) {
    const int predicted = predict(c.text, model).label;
    if (c.label == 1) {
      (predicted == 1 ? tp : fn) += 1;
    } else {
      (predicted == 1 ? fp : tn) += 1;
    }
  }
  EvalReport r = report_from_counts(tp, fp, tn, fn);
  if (macro) {
    // The negative class report swaps the roles of the counts.
    const EvalReport neg = report_from_counts(tn, fn, tp, fp);
    r.f1 = (r.f1 + neg.f1) / 2.0;
    r.precision = (r.precision + neg.precision) / 2.0;
    r.recall = (r.recall + neg.recall) / 2.0;
  }
  return r;
}

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["version"] = model.version;
  doc["vocabulary"] = {{"terms", model.vocabulary.terms},
                       {"document_frequency", model.vocabulary.document_frequency},
                       {"n_gram_range", {model.vocabulary.ngram_low, model.vocabulary.ngram_high}}};
  doc["idf"] = model.idf;
  doc["r"] = model.nb_log_ratio;
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["threshold"] = model.decision_threshold;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open classifier file for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("failed writing classifier file: " + path.string());
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open classifier file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed classifier file " + path.string() + ": " + e.what());
  }
  try {
    const std::string version = doc.at("version").get<std::string>();
    if (version != ClassifierModel::kFormatVersion) {
      throw IncompatibleModelError("classifier file " + path.string() + " has format version '" +
                                   version + "', expected '" + ClassifierModel::kFormatVersion +
                                   "'");
    }
    ClassifierModel model;
    model.version = version;
    const auto& vocab = doc.at("vocabulary");
    model.vocabulary.terms = vocab.at("terms").get<std::vector<std::string>>();
    model.vocabulary.document_frequency =
        vocab.at("document_frequency").get<std::vector<std::int64_t>>();
    model.vocabulary.ngram_low = vocab.at("n_gram_range").at(0).get<int>();
    model.vocabulary.ngram_high = vocab.at("n_gram_range").at(1).get<int>();
    model.vocabulary.rebuild_index();
    model.idf = doc.at("idf").get<std::vector<double>>();
    model.nb_log_ratio = doc.at("r").get<std::vector<double>>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    model.bias = doc.at("bias").get<double>();
    model.decision_threshold = doc.at("threshold").get<double>();
    const std::size_t dim = model.vocabulary.size();
    if (model.idf.size() != dim || model.nb_log_ratio.size() != dim ||
        model.weights.size() != dim) {
      throw ParseError("classifier file " + path.string() + ": weight vector length mismatch");
    }
    return model;
  } catch (const IncompatibleModelError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed classifier file " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

Corpus transform_texts(const Corpus& corpus, const CleaningConfig& config) {
  return clean_corpus(corpus, config);
}

}  // namespace

std::vector<AblationRow> run_ablation(const Corpus& raw, const AblationConfig& config,
                                      const ScriptProfiles& profiles) {
  if (!config.native_table.has_value()) {
    throw ConfigError("ablation requires a native transliteration table");
  }

  const Corpus base = aggregate_post_metadata(raw);
  const auto [train_part, val_part] = stratified_split(base, config.validation_fraction,
                                                       config.seed, config.stratify_by_language);

  CleaningConfig cleaned_cfg = config.cleaning;
  cleaned_cfg.transliteration.reset();
  CleaningConfig native_cfg = config.cleaning;
  native_cfg.transliteration = *config.native_table;

  const auto evaluate_variant = [&](const Corpus& train_corpus,
                                    const Corpus& val_corpus) -> EvalReport {
    const ClassifierModel model = train(train_corpus, config.classifier);
    return evaluate(model, val_corpus);
  };

  std::vector<AblationRow> rows;
  rows.push_back({"Raw Dataset", evaluate_variant(train_part, val_part)});

  const Corpus train_cleaned = transform_texts(train_part, cleaned_cfg);
  const Corpus val_cleaned = transform_texts(val_part, cleaned_cfg);
  rows.push_back({"Cleaned Dataset", evaluate_variant(train_cleaned, val_cleaned)});

  const Corpus train_native = transform_texts(train_part, native_cfg);
  const Corpus val_native = transform_texts(val_part, native_cfg);
  rows.push_back(
      {"Cleaned + Native Transliteration Dataset", evaluate_variant(train_native, val_native)});

  // Spell model is fit on the training half only, then applied to both.
  const StatsMap stats = count_stats(train_native, profiles);
  const WordGraph graph = build_graph(stats, config.graph);
  const Corrector corrector(extract_clusters(graph, stats, config.graph));
  const Corpus train_corrected = corrector.correct_corpus(train_native);
  const Corpus val_corrected = corrector.correct_corpus(val_native);
  rows.push_back({"Cleaned + Native Transliteration + Spell-Corrected Dataset",
                  evaluate_variant(train_corrected, val_corrected)});

  if (config.english_table.has_value()) {
    CleaningConfig english_cfg = config.cleaning;
    english_cfg.transliteration = *config.english_table;
    rows.push_back({"Cleaned + English Transliteration Dataset",
                    evaluate_variant(transform_texts(train_part, english_cfg),
                                     transform_texts(val_part, english_cfg))});
  }
  return rows;
}

void write_ablation_tsv(const std::vector<AblationRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open report file for writing: " + path.string());
  out << "variant\tf1\tprecision\trecall\ttp\tfp\ttn\tfn\n";
  out << std::fixed << std::setprecision(4);
  for (const AblationRow& row : rows) {
    out << row.name << '\t' << row.report.f1 << '\t' << row.report.precision << '\t'
        << row.report.recall << '\t' << row.report.tp << '\t' << row.report.fp << '\t'
        << row.report.tn << '\t' << row.report.fn << '\n';
  }
  if (!out) throw Error("failed writing report file: " + path.string());
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::size_t width = std::string("Model").size();
  for (const AblationRow& row : rows) width = std::max(width, row.name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "Model" << "  Val. F1\n";
  out << std::string(width + 9, '-') << '\n';
  out << std::fixed << std::setprecision(4);
  for (const AblationRow& row : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << row.name << "  " << row.report.f1
        << '\n';
  }
  return out.str();
}

}  // namespace cmtk

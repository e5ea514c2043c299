#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cmtk/classify.hpp"
#include "cmtk/error.hpp"
#include "oracles.hpp"

using namespace cmtk;

namespace {

Corpus corpus_of(const std::vector<std::pair<std::string, int>>& rows) {
  Corpus corpus;
  int i = 0;
  for (const auto& [text, label] : rows) {
    Comment c;
    c.comment_id = "c" + std::to_string(++i);
    c.post_id = "p";
    c.text = text;
    c.language = "hi";
    c.label = label;
    corpus.comments.push_back(std::move(c));
  }
  return corpus;
}

// 10 abusive + 10 clean documents, linearly separable on one token.
Corpus separable_corpus() {
  std::vector<std::pair<std::string, int>> rows;
  const char* fillers[] = {"movie", "song", "dance", "cricket", "food"};
  for (int i = 0; i < 10; ++i) {
    rows.push_back({std::string("gaali word ") + fillers[i % 5], 1});
    rows.push_back({std::string("pyaar word ") + fillers[i % 5], 0});
  }
  return corpus_of(rows);
}

}  // namespace

TEST_CASE("fit_vocabulary") {
  const Corpus corpus = corpus_of({{"a b", 0}, {"a c", 1}});
  const Vocabulary v1 = fit_vocabulary(corpus, 1, 1, 1);
  CHECK(v1.terms == std::vector<std::string>{"a", "b", "c"});
  CHECK(v1.document_frequency == std::vector<std::int64_t>{2, 1, 1});

  const Vocabulary v2 = fit_vocabulary(corpus, 1, 1, 2);
  CHECK(v2.terms == std::vector<std::string>{"a"});

  const Vocabulary v3 = fit_vocabulary(corpus_of({{"a b c", 0}}), 2, 2, 1);
  CHECK(v3.terms == std::vector<std::string>{"a b", "b c"});

  CHECK_THROWS_AS(fit_vocabulary(corpus, 1, 1, 99), Error);
  CHECK_THROWS_AS(fit_vocabulary(Corpus{}, 1, 1, 1), ConfigError);
  CHECK_THROWS_AS(fit_vocabulary(corpus, 2, 1, 1), ConfigError);
}

TEST_CASE("tfidf_vector") {
  const Corpus corpus = corpus_of({{"a b", 0}, {"a c", 1}, {"a d", 1}});
  const Vocabulary vocab = fit_vocabulary(corpus, 1, 1, 1);
  const std::vector<double> idf = compute_idf(vocab, 3);

  SUBCASE("all-OOV text gives a zero vector") {
    CHECK(tfidf_vector("zzz yyy", vocab, idf).empty());
  }

  SUBCASE("single-term text is a unit vector") {
    const SparseVec v = tfidf_vector("b", vocab, idf);
    REQUIRE(v.size() == 1);
    CHECK(v[0].second == doctest::Approx(1.0));
  }

  SUBCASE("unit norm whenever a vocabulary term is present") {
    for (const char* text : {"a b", "a a c zzz", "d d d b"}) {
      double norm_sq = 0.0;
      for (const auto& [t, w] : tfidf_vector(text, vocab, idf)) norm_sq += w * w;
      CHECK(std::sqrt(norm_sq) == doctest::Approx(1.0));
    }
  }

  SUBCASE("duplicated term doubles raw tf before normalization") {
    // With equal idf across present terms, tf ratio survives normalization.
    const SparseVec v = tfidf_vector("b b c", vocab, idf);
    REQUIRE(v.size() == 2);
    const double b_weight = v[0].first == vocab.index.at("b") ? v[0].second : v[1].second;
    const double c_weight = v[0].first == vocab.index.at("c") ? v[0].second : v[1].second;
    CHECK(b_weight == doctest::Approx(2.0 * c_weight));
  }

  SUBCASE("idf formula") {
    // df(a)=3 of N=3: ln(4/4)+1 = 1; df(b)=1: ln(4/2)+1
    CHECK(idf[static_cast<std::size_t>(vocab.index.at("a"))] == doctest::Approx(1.0));
    CHECK(idf[static_cast<std::size_t>(vocab.index.at("b"))] ==
          doctest::Approx(std::log(2.0) + 1.0));
  }
}

TEST_CASE("nb_log_ratios sign properties") {
  const Corpus corpus = corpus_of(
      {{"gaali filler", 1}, {"gaali stuff", 1}, {"pyaar filler", 0}, {"pyaar stuff", 0}});
  const Vocabulary vocab = fit_vocabulary(corpus, 1, 1, 1);
  const std::vector<double> r = nb_log_ratios(corpus, vocab);

  CHECK(r[static_cast<std::size_t>(vocab.index.at("gaali"))] > 0.0);
  CHECK(r[static_cast<std::size_t>(vocab.index.at("pyaar"))] < 0.0);
  // Terms with equal mass in both classes sit near zero.
  CHECK(std::abs(r[static_cast<std::size_t>(vocab.index.at("filler"))]) < 1e-9);

  CHECK_THROWS_AS(nb_log_ratios(corpus_of({{"x", 1}, {"y", 1}}), vocab), Error);
}

TEST_CASE("train on separable corpus reaches F1 1.0") {
  const Corpus corpus = separable_corpus();
  ClassifierConfig config;
  config.min_df = 1;
  TrainDiagnostics diag;
  const ClassifierModel model = train(corpus, config, &diag);

  const EvalReport report = evaluate(model, corpus);
  CHECK(report.f1 == doctest::Approx(1.0));
  CHECK(report.fp == 0);
  CHECK(report.fn == 0);

  SUBCASE("loss never increases across iterations") {
    for (std::size_t i = 1; i < diag.losses.size(); ++i) {
      CHECK(diag.losses[i] <= diag.losses[i - 1] + 1e-12);
    }
  }

  SUBCASE("deterministic retraining") {
    const ClassifierModel again = train(corpus, config);
    CHECK(again.weights == model.weights);
    CHECK(again.bias == model.bias);
  }

  SUBCASE("single-class corpus is an error") {
    CHECK_THROWS_AS(train(corpus_of({{"a b", 1}, {"c d", 1}}), config), Error);
  }
}

TEST_CASE("predict") {
  const Corpus corpus = separable_corpus();
  ClassifierConfig config;
  config.min_df = 1;
  const ClassifierModel model = train(corpus, config);

  SUBCASE("zero vector input gives sigmoid(bias)") {
    const Prediction p = predict("zzzz qqqq", model);
    CHECK(p.probability == doctest::Approx(1.0 / (1.0 + std::exp(-model.bias))));
  }

  SUBCASE("threshold is >= so 0.5 maps to label 1") {
    ClassifierModel biased = model;
    std::fill(biased.weights.begin(), biased.weights.end(), 0.0);
    biased.bias = 0.0;  // probability exactly 0.5
    CHECK(predict("anything", biased).label == 1);
  }

  SUBCASE("abusive text scores above clean text") {
    CHECK(predict("gaali word", model).probability > predict("pyaar word", model).probability);
    CHECK(predict("gaali word", model).label == 1);
    CHECK(predict("pyaar word", model).label == 0);
  }
}

TEST_CASE("report_from_counts matches hand arithmetic") {
  const EvalReport r = report_from_counts(2, 1, 0, 1);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall == doctest::Approx(2.0 / 3.0));
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0));

  SUBCASE("degenerate convention: no positives anywhere") {
    const EvalReport zero = report_from_counts(0, 0, 5, 0);
    CHECK(zero.f1 == 0.0);
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
  }

  SUBCASE("exhaustive small grid against the oracle") {
    for (std::int64_t tp = 0; tp <= 2; ++tp) {
      for (std::int64_t fp = 0; fp <= 2; ++fp) {
        for (std::int64_t fn = 0; fn <= 2; ++fn) {
          for (std::int64_t tn = 0; tn <= 2; ++tn) {
            const EvalReport got = report_from_counts(tp, fp, tn, fn);
            CHECK(got.f1 == doctest::Approx(oracle::f1_from_counts(tp, fp, fn)));
          }
        }
      }
    }
  }
}

TEST_CASE("evaluate perfect predictions") {
  const Corpus corpus = separable_corpus();
  ClassifierConfig config;
  config.min_df = 1;
  const ClassifierModel model = train(corpus, config);
  const EvalReport report = evaluate(model, corpus);
  CHECK(report.f1 == doctest::Approx(1.0));
  CHECK(report.tp + report.fn == 10);
  CHECK(report.tn + report.fp == 10);

  SUBCASE("macro averaging stays 1.0 on a perfect model") {
    CHECK(evaluate(model, corpus, true).f1 == doctest::Approx(1.0));
  }
}

TEST_CASE("classifier save/load round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cmtk_classify_tests";
  fs::create_directories(dir);

  ClassifierConfig config;
  config.min_df = 1;
  const ClassifierModel model = train(separable_corpus(), config);
  const fs::path p = dir / "clf.json";
  save_classifier(model, p);
  const ClassifierModel back = load_classifier(p);

  CHECK(back.vocabulary.terms == model.vocabulary.terms);
  CHECK(back.weights == model.weights);
  CHECK(back.bias == model.bias);
  CHECK(back.idf == model.idf);
  CHECK(back.nb_log_ratio == model.nb_log_ratio);
  CHECK(predict("gaali word", back).probability ==
        doctest::Approx(predict("gaali word", model).probability));

  SUBCASE("wrong version rejected") {
    const fs::path bad = dir / "clf_bad.json";
    {
      std::ifstream in(p);
      nlohmann::json doc = nlohmann::json::parse(in);
      doc["version"] = "99";
      std::ofstream out(bad, std::ios::binary);
      out << doc.dump();
    }
    CHECK_THROWS_AS(load_classifier(bad), IncompatibleModelError);
  }
}

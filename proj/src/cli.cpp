#include "cmtk/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cmtk/classify.hpp"
#include "cmtk/cluster.hpp"
#include "cmtk/correct.hpp"
#include "cmtk/corpus.hpp"
#include "cmtk/error.hpp"
#include "cmtk/normalize.hpp"
#include "cmtk/synthetic.hpp"
#include "cmtk/wordgraph.hpp"

namespace cmtk::cli {

namespace {

struct CleaningOptions {
  std::string unicode_form = "NFKC";
  int collapse_threshold = 2;
  std::string special_chars;  // empty = default set
  std::string translit_table;
  bool translit_identity = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--unicode-form", unicode_form, "Unicode normalization form (NFC or NFKC)")
        ->check(CLI::IsMember({"NFC", "NFKC"}))
        ->capture_default_str();
    cmd->add_option("--collapse-threshold", collapse_threshold,
                    "Collapse character runs longer than this")
        ->check(CLI::Range(2, 100))
        ->capture_default_str();
    cmd->add_option("--special-chars", special_chars,
                    "Characters to strip (default: ASCII punctuation except ' and -)");
    cmd->add_option("--translit-table", translit_table, "Transliteration table TSV");
    cmd->add_flag("--translit-identity", translit_identity,
                  "Enable the transliteration hook with the identity table");
  }

  CleaningConfig build() const {
    CleaningConfig config = CleaningConfig::defaults();
    config.unicode_form = unicode_form == "NFC" ? UnicodeForm::NFC : UnicodeForm::NFKC;
    config.collapse_threshold = collapse_threshold;
    if (!special_chars.empty()) {
      config.special_chars.clear();
      for (char32_t cp : decode_utf8(special_chars)) config.special_chars.insert(cp);
    }
    if (!translit_table.empty()) {
      config.transliteration = TransliterationTable::load(translit_table);
    } else if (translit_identity) {
      config.transliteration = TransliterationTable::identity();
    }
    return config;
  }
};

struct GraphOptions {
  GraphConfig config;
  std::string profiles_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--min-abusive-freq", config.min_abusive_frequency,
                    "Minimum occurrences in abusive comments")
        ->capture_default_str();
    cmd->add_option("--min-length", config.min_length, "Minimum word length in graphemes")
        ->capture_default_str();
    cmd->add_option("--min-consonants", config.min_consonants, "Minimum consonant count")
        ->capture_default_str();
    cmd->add_option("--prefix-len,-k", config.prefix_len, "Shared-prefix gate length")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
    cmd->add_option("--similarity-threshold,-t", config.similarity_threshold,
                    "Edge/correction similarity threshold in [0,100]")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--script-profiles", profiles_path, "Extra consonant profiles TSV");
  }

  ScriptProfiles build_profiles() const {
    ScriptProfiles profiles = ScriptProfiles::builtin();
    if (!profiles_path.empty()) profiles.load_tsv(profiles_path);
    return profiles;
  }
};

struct ClassifierOptions {
  ClassifierConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--ngram-low", config.ngram_low, "Smallest n-gram size")
        ->check(CLI::Range(1, 5))
        ->capture_default_str();
    cmd->add_option("--ngram-high", config.ngram_high, "Largest n-gram size")
        ->check(CLI::Range(1, 5))
        ->capture_default_str();
    cmd->add_option("--min-df", config.min_df, "Minimum document frequency")
        ->capture_default_str();
    cmd->add_option("--l2", config.l2, "L2 regularization strength")->capture_default_str();
    cmd->add_option("--max-iter", config.max_iterations, "Optimizer iteration cap")
        ->capture_default_str();
    cmd->add_option("--decision-threshold", config.decision_threshold,
                    "Probability threshold for the abusive label")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }
};

void add_config_file(CLI::App* cmd) {
  static std::string sink;
  cmd->add_option("--config", sink, "Key/value config file; flags override it");
}

// CLI11 only reads set_config files on the app that owns parse(), so config
// handling happens before parsing: `key = value` lines become `--key=value`
// arguments appended after the explicit flags. An explicit flag (or its
// short alias) silences the config entry, so the command line always wins.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file: " + config_path);

  static const std::map<std::string, std::string> kShortAliases = {
      {"prefix-len", "-k"}, {"similarity-threshold", "-t"}};
  const auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    const auto alias = kShortAliases.find(key);
    for (const std::string& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
      if (alias != kShortAliases.end() && a == alias->second) return true;
    }
    return false;
  };

  std::vector<std::string> expanded = args;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#' || line[first] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(config_path + ":" + std::to_string(line_no) +
                        ": expected `key = value`");
    }
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) {
      throw ConfigError(config_path + ":" + std::to_string(line_no) + ": empty key");
    }
    if (!given(key)) expanded.push_back("--" + key + "=" + value);
  }
  return expanded;
}

void print_spell_summary(const CorrectionModel& model) {
  std::size_t multi = 0;
  std::size_t largest = 0;
  for (const Cluster& c : model.clusters) {
    if (c.members.size() > 1) ++multi;
    largest = std::max(largest, c.members.size());
  }
  std::cerr << "clusters: " << model.clusters.size() << " (" << multi
            << " multi-member, largest " << largest << ")\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Corpus-adaptive spell correction and abusive-comment classification toolkit"};
  app.require_subcommand(1);

  // ---- clean -------------------------------------------------------------
  auto* clean_cmd = app.add_subcommand("clean", "Aggregate post metadata and clean comment text");
  std::string clean_input, clean_output;
  CleaningOptions clean_opts;
  clean_cmd->add_option("--input", clean_input, "Input corpus (.csv or .jsonl)")->required();
  clean_cmd->add_option("--output", clean_output, "Output corpus path")->required();
  clean_opts.attach(clean_cmd);
  add_config_file(clean_cmd);

  // ---- train-spell -------------------------------------------------------
  auto* train_spell_cmd =
      app.add_subcommand("train-spell", "Build the word graph and extract correction clusters");
  std::string ts_input, ts_model_out, ts_graph_dump;
  GraphOptions ts_graph;
  train_spell_cmd->add_option("--input", ts_input, "Cleaned training corpus")->required();
  train_spell_cmd->add_option("--model-out", ts_model_out, "Correction model output path")
      ->required();
  train_spell_cmd->add_option("--graph-dump", ts_graph_dump,
                              "Write the word graph as adjacency-list text (debug)");
  ts_graph.attach(train_spell_cmd);
  add_config_file(train_spell_cmd);

  // ---- correct -----------------------------------------------------------
  auto* correct_cmd = app.add_subcommand("correct", "Auto-correct a corpus with a trained model");
  std::string co_input, co_model, co_output, co_audit;
  correct_cmd->add_option("--input", co_input, "Corpus to correct")->required();
  correct_cmd->add_option("--model", co_model, "Correction model")->required();
  correct_cmd->add_option("--output", co_output, "Corrected corpus output path")->required();
  correct_cmd->add_option("--audit", co_audit, "Audit TSV for changed tokens");
  add_config_file(correct_cmd);

  // ---- train-classifier ---------------------------------------------------
  auto* train_clf_cmd =
      app.add_subcommand("train-classifier", "Train the NB-weighted TF-IDF logistic regression");
  std::string tc_input, tc_model_out;
  double tc_val_fraction = 0.1;
  std::uint64_t tc_seed = 0;
  bool tc_by_language = false;
  ClassifierOptions tc_opts;
  train_clf_cmd->add_option("--input", tc_input, "Labeled training corpus")->required();
  train_clf_cmd->add_option("--model-out", tc_model_out, "Classifier output path")->required();
  train_clf_cmd->add_option("--val-fraction", tc_val_fraction,
                            "Held-out validation fraction (0 trains on everything)")
      ->check(CLI::Range(0.0, 0.999))
      ->capture_default_str();
  train_clf_cmd->add_option("--seed", tc_seed, "Split seed")->capture_default_str();
  train_clf_cmd->add_flag("--stratify-by-language", tc_by_language,
                          "Stratify the split by label and language");
  tc_opts.attach(train_clf_cmd);
  add_config_file(train_clf_cmd);

  // ---- predict -----------------------------------------------------------
  auto* predict_cmd = app.add_subcommand("predict", "Score a corpus with a trained classifier");
  std::string pr_input, pr_model, pr_output;
  predict_cmd->add_option("--input", pr_input, "Corpus to score")->required();
  predict_cmd->add_option("--model", pr_model, "Classifier model")->required();
  predict_cmd->add_option("--output", pr_output, "Predictions TSV output path")->required();
  add_config_file(predict_cmd);

  // ---- evaluate ----------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a classifier on a labeled corpus");
  std::string ev_input, ev_model, ev_report;
  bool ev_macro = false;
  eval_cmd->add_option("--input", ev_input, "Labeled corpus")->required();
  eval_cmd->add_option("--model", ev_model, "Classifier model")->required();
  eval_cmd->add_option("--report-out", ev_report, "Report TSV output path");
  eval_cmd->add_flag("--macro", ev_macro, "Macro-average F1 over both classes");
  add_config_file(eval_cmd);

  // ---- ablate ------------------------------------------------------------
  auto* ablate_cmd =
      app.add_subcommand("ablate", "Run the cleaning/transliteration/spell-correction ladder");
  std::string ab_input, ab_report_out, ab_english_table;
  double ab_val_fraction = 0.1;
  std::uint64_t ab_seed = 0;
  bool ab_by_language = false;
  CleaningOptions ab_clean_opts;
  GraphOptions ab_graph;
  ClassifierOptions ab_clf;
  ablate_cmd->add_option("--input", ab_input, "Raw labeled corpus")->required();
  ablate_cmd->add_option("--report-out", ab_report_out, "Report TSV output path")->required();
  ablate_cmd->add_option("--english-translit-table", ab_english_table,
                         "Adds the English-transliteration variant");
  ablate_cmd->add_option("--val-fraction", ab_val_fraction, "Validation fraction")
      ->check(CLI::Range(0.001, 0.999))
      ->capture_default_str();
  ablate_cmd->add_option("--seed", ab_seed, "Split seed")->capture_default_str();
  ablate_cmd->add_flag("--stratify-by-language", ab_by_language,
                       "Stratify the split by label and language");
  ab_clean_opts.attach(ablate_cmd);
  ab_graph.attach(ablate_cmd);
  ab_clf.attach(ablate_cmd);
  add_config_file(ablate_cmd);

  // ---- generate ----------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("generate", "Emit a synthetic labeled corpus");
  std::string gen_output, gen_groups_out, gen_table_out, gen_script = "latin",
              gen_edit_kind = "insert";
  SyntheticSpec gen_spec;
  gen_cmd->add_option("--output", gen_output, "Corpus output path (.csv or .jsonl)")->required();
  gen_cmd->add_option("--groups-out", gen_groups_out, "Ground-truth groups TSV")->required();
  gen_cmd->add_option("--translit-table-out", gen_table_out,
                      "Write the synthetic native transliteration table here");
  gen_cmd->add_option("--n-base", gen_spec.n_base_words, "Planted base words")
      ->capture_default_str();
  gen_cmd->add_option("--variants", gen_spec.variants_per_word, "Variants per base word")
      ->capture_default_str();
  gen_cmd->add_option("--edits", gen_spec.edit_ops_per_variant, "Edit operations per variant")
      ->capture_default_str();
  gen_cmd->add_option("--comments", gen_spec.n_comments, "Total comments")->capture_default_str();
  gen_cmd->add_option("--ratio", gen_spec.abusive_ratio, "Abusive fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--script", gen_script, "Base script (latin or devanagari)")
      ->check(CLI::IsMember({"latin", "devanagari"}))
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen_spec.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--variant-rate", gen_spec.variant_rate,
                      "Share of abusive mentions rendered as variants")
      ->check(CLI::Range(0.0, 0.99))
      ->capture_default_str();
  gen_cmd->add_option("--decoration-rate", gen_spec.decoration_rate,
                      "Per-token decoration probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--translit-rate", gen_spec.translit_rate,
                      "Per-comment second-script probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--fresh-typo-rate", gen_spec.fresh_typo_rate,
                      "Share of mentions mangled by an extra unseen edit")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--edit-kind", gen_edit_kind, "Variant edit kind")
      ->check(CLI::IsMember({"insert", "substitute", "mixed"}))
      ->capture_default_str();
  add_config_file(gen_cmd);

  std::vector<std::string> expanded;
  try {
    expanded = expand_config_args(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<const char*> argv;
  argv.push_back("cmtk");
  for (const std::string& a : expanded) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (clean_cmd->parsed()) {
      const CleaningConfig config = clean_opts.build();
      Corpus corpus = ingest(clean_input);
      corpus = aggregate_post_metadata(corpus);
      corpus = clean_corpus(corpus, config);
      write_corpus(corpus, clean_output);
      std::cerr << "cleaned " << corpus.size() << " comments -> " << clean_output << '\n';
    } else if (train_spell_cmd->parsed()) {
      const ScriptProfiles profiles = ts_graph.build_profiles();
      const Corpus corpus = ingest(ts_input);
      const StatsMap stats = count_stats(corpus, profiles);
      const WordGraph graph = build_graph(stats, ts_graph.config);
      if (graph.empty()) {
        std::cerr << "warning: no word passes the graph filters; writing an empty model\n";
      }
      if (!ts_graph_dump.empty()) {
        std::ofstream dump(ts_graph_dump, std::ios::binary);
        if (!dump) throw ConfigError("cannot open graph dump file: " + ts_graph_dump);
        dump << dump_graph(graph);
      }
      const CorrectionModel model = extract_clusters(graph, stats, ts_graph.config);
      save_model(model, ts_model_out);
      print_spell_summary(model);
    } else if (correct_cmd->parsed()) {
      const Corrector corrector(load_model(co_model));
      const Corpus corpus = ingest(co_input);
      std::vector<AuditRow> audit;
      const Corpus corrected =
          corrector.correct_corpus(corpus, co_audit.empty() ? nullptr : &audit);
      write_corpus(corrected, co_output);
      if (!co_audit.empty()) {
        write_audit(audit, co_audit);
        std::cerr << "changed tokens: " << audit.size() << '\n';
      }
    } else if (train_clf_cmd->parsed()) {
      Corpus corpus = ingest(tc_input);
      corpus = aggregate_post_metadata(corpus);
      ClassifierModel model;
      if (tc_val_fraction > 0.0) {
        const auto [train_part, val_part] =
            stratified_split(corpus, tc_val_fraction, tc_seed, tc_by_language);
        model = train(train_part, tc_opts.config);
        const EvalReport report = evaluate(model, val_part);
        std::cerr << "validation F1 " << report.f1 << " (precision " << report.precision
                  << ", recall " << report.recall << ")\n";
      } else {
        model = train(corpus, tc_opts.config);
      }
      save_classifier(model, tc_model_out);
    } else if (predict_cmd->parsed()) {
      const ClassifierModel model = load_classifier(pr_model);
      const Corpus corpus = ingest(pr_input);
      std::ofstream out(pr_output, std::ios::binary);
      if (!out) throw ConfigError("cannot open output file: " + pr_output);
      out << "comment_id\tprobability\tlabel\n";
      out << std::fixed << std::setprecision(6);
      for (const Comment& c : corpus.comments) {
        const Prediction p = predict(c.text, model);
        out << c.comment_id << '\t' << p.probability << '\t' << p.label << '\n';
      }
    } else if (eval_cmd->parsed()) {
      const ClassifierModel model = load_classifier(ev_model);
      const Corpus corpus = ingest(ev_input);
      const EvalReport report = evaluate(model, corpus, ev_macro);
      std::ostringstream text;
      text << std::fixed << std::setprecision(4) << "f1\t" << report.f1 << "\nprecision\t"
           << report.precision << "\nrecall\t" << report.recall << "\ntp\t" << report.tp
           << "\nfp\t" << report.fp << "\ntn\t" << report.tn << "\nfn\t" << report.fn << '\n';
      if (!ev_report.empty()) {
        std::ofstream out(ev_report, std::ios::binary);
        if (!out) throw ConfigError("cannot open report file: " + ev_report);
        out << text.str();
      }
      std::cout << text.str();
    } else if (ablate_cmd->parsed()) {
      AblationConfig config;
      config.cleaning = ab_clean_opts.build();
      config.native_table = config.cleaning.transliteration;
      config.cleaning.transliteration.reset();
      if (!config.native_table.has_value()) {
        throw ConfigError(
            "ablate needs --translit-table (or --translit-identity) for the "
            "transliteration variants");
      }
      if (!ab_english_table.empty()) {
        config.english_table = TransliterationTable::load(ab_english_table);
      }
      config.graph = ab_graph.config;
      config.classifier = ab_clf.config;
      config.validation_fraction = ab_val_fraction;
      config.seed = ab_seed;
      config.stratify_by_language = ab_by_language;
      const ScriptProfiles profiles = ab_graph.build_profiles();
      const Corpus corpus = ingest(ab_input);
      const std::vector<AblationRow> rows = run_ablation(corpus, config, profiles);
      write_ablation_tsv(rows, ab_report_out);
      std::cout << format_ablation_table(rows);
    } else if (gen_cmd->parsed()) {
      gen_spec.script = gen_script;
      gen_spec.edit_kind = gen_edit_kind == "insert"       ? SyntheticSpec::EditKind::Insert
                           : gen_edit_kind == "substitute" ? SyntheticSpec::EditKind::Substitute
                                                           : SyntheticSpec::EditKind::Mixed;
      const SyntheticResult result = generate_synthetic(gen_spec);
      write_corpus(result.corpus, gen_output);
      write_groups_tsv(result.groups, gen_groups_out);
      if (!gen_table_out.empty()) {
        const TransliterationTable table = synthetic_native_table();
        std::ofstream out(gen_table_out, std::ios::binary);
        if (!out) throw ConfigError("cannot open table file: " + gen_table_out);
        out << "#source_script=" << table.source_script << '\n';
        out << "#target_script=" << table.target_script << '\n';
        for (const auto& [src, dst] : table.entries) {
          out << encode_utf8(src) << '\t' << encode_utf8(dst) << '\n';
        }
      }
      std::cerr << "generated " << result.corpus.size() << " comments, "
                << result.groups.size() << " planted variants (within-threshold fraction "
                << result.within_threshold_fraction << ")\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace cmtk::cli

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cmtk/cli.hpp"
#include "cmtk/cluster.hpp"
#include "cmtk/corpus.hpp"

using namespace cmtk;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "cmtk_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

int run(std::initializer_list<std::string> args) { return cli::run(std::vector<std::string>(args)); }

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({}) == 2);
  CHECK(run({"no-such-command"}) == 2);
  CHECK(run({"clean"}) == 2);  // missing required flags
  CHECK(run({"clean", "--input", (work_dir() / "nope.csv").string(), "--output",
             (work_dir() / "out.csv").string()}) == 2);  // missing input file
}

TEST_CASE("malformed data exits with code 1") {
  const fs::path dir = work_dir();
  const fs::path bad = dir / "malformed.csv";
  {
    std::ofstream out(bad);
    out << "comment_id,post_id,text,language,comment_likes,comment_reports,post_likes,"
           "post_reports,label\nc1,p1,t,hi,NOT_A_NUMBER,0,0,0,1\n";
  }
  CHECK(run({"clean", "--input", bad.string(), "--output", (dir / "out.csv").string()}) == 1);
}

TEST_CASE("generate then clean then train-spell then correct") {
  const fs::path dir = work_dir();
  const fs::path raw = dir / "raw.csv";
  const fs::path groups = dir / "groups.tsv";
  const fs::path table = dir / "table.tsv";
  const fs::path cleaned = dir / "cleaned.csv";
  const fs::path model = dir / "model.json";
  const fs::path corrected = dir / "corrected.csv";
  const fs::path audit = dir / "audit.tsv";

  CHECK(run({"generate", "--output", raw.string(), "--groups-out", groups.string(),
             "--translit-table-out", table.string(), "--comments", "800", "--seed", "9"}) == 0);
  CHECK(fs::exists(raw));
  CHECK(fs::exists(groups));
  CHECK(fs::exists(table));

  CHECK(run({"clean", "--input", raw.string(), "--output", cleaned.string()}) == 0);
  const Corpus cleaned_corpus = ingest(cleaned);
  CHECK(cleaned_corpus.size() == 800);

  CHECK(run({"train-spell", "--input", cleaned.string(), "--model-out", model.string()}) == 0);
  const CorrectionModel m = load_model(model);
  CHECK(!m.clusters.empty());

  CHECK(run({"correct", "--input", cleaned.string(), "--model", model.string(), "--output",
             corrected.string(), "--audit", audit.string()}) == 0);
  CHECK(fs::exists(audit));
  const std::string audit_text = slurp(audit);
  CHECK(audit_text.rfind("original\tcorrected\tparent\tscore\n", 0) == 0);
  CHECK(audit_text.size() > audit_text.find('\n') + 1);  // at least one change

  SUBCASE("correcting the corrected output is a fixed point") {
    const fs::path again = dir / "corrected2.csv";
    CHECK(run({"correct", "--input", corrected.string(), "--model", model.string(), "--output",
               again.string()}) == 0);
    CHECK(slurp(again) == slurp(corrected));
  }
}

TEST_CASE("fixed seed reruns are byte identical") {
  const fs::path dir = work_dir() / "determinism";
  fs::create_directories(dir);

  const auto generate_into = [&](const fs::path& sub) {
    fs::create_directories(sub);
    const fs::path raw = sub / "raw.csv";
    const fs::path groups = sub / "groups.tsv";
    REQUIRE(run({"generate", "--output", raw.string(), "--groups-out", groups.string(),
                 "--comments", "600", "--seed", "4", "--translit-rate", "0.2"}) == 0);
    const fs::path cleaned = sub / "cleaned.csv";
    REQUIRE(run({"clean", "--input", raw.string(), "--output", cleaned.string()}) == 0);
    const fs::path model = sub / "model.json";
    REQUIRE(run({"train-spell", "--input", cleaned.string(), "--model-out", model.string()}) == 0);
    const fs::path clf = sub / "clf.json";
    REQUIRE(run({"train-classifier", "--input", cleaned.string(), "--model-out", clf.string(),
                 "--seed", "3", "--max-iter", "60"}) == 0);
    return std::array<std::string, 4>{slurp(raw), slurp(cleaned), slurp(model), slurp(clf)};
  };

  const auto a = generate_into(dir / "a");
  const auto b = generate_into(dir / "b");
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("evaluate and predict produce reports") {
  const fs::path dir = work_dir() / "eval";
  fs::create_directories(dir);
  const fs::path raw = dir / "raw.csv";
  const fs::path groups = dir / "groups.tsv";
  REQUIRE(run({"generate", "--output", raw.string(), "--groups-out", groups.string(),
               "--comments", "500", "--seed", "2"}) == 0);
  const fs::path clf = dir / "clf.json";
  REQUIRE(run({"train-classifier", "--input", raw.string(), "--model-out", clf.string(),
               "--max-iter", "60"}) == 0);

  const fs::path report = dir / "report.tsv";
  CHECK(run({"evaluate", "--input", raw.string(), "--model", clf.string(), "--report-out",
             report.string()}) == 0);
  CHECK(slurp(report).rfind("f1\t", 0) == 0);

  const fs::path preds = dir / "preds.tsv";
  CHECK(run({"predict", "--input", raw.string(), "--model", clf.string(), "--output",
             preds.string()}) == 0);
  const std::string pred_text = slurp(preds);
  CHECK(pred_text.rfind("comment_id\tprobability\tlabel\n", 0) == 0);
}

TEST_CASE("ablate requires a transliteration table") {
  const fs::path dir = work_dir() / "ablate_err";
  fs::create_directories(dir);
  const fs::path raw = dir / "raw.csv";
  const fs::path groups = dir / "groups.tsv";
  REQUIRE(run({"generate", "--output", raw.string(), "--groups-out", groups.string(),
               "--comments", "300", "--seed", "5"}) == 0);
  CHECK(run({"ablate", "--input", raw.string(), "--report-out",
             (dir / "report.tsv").string()}) == 2);
}

TEST_CASE("ablate emits 4 rows, 5 with the english table") {
  const fs::path dir = work_dir() / "ablate_rows";
  fs::create_directories(dir);
  const fs::path raw = dir / "raw.csv";
  const fs::path groups = dir / "groups.tsv";
  const fs::path table = dir / "table.tsv";
  REQUIRE(run({"generate", "--output", raw.string(), "--groups-out", groups.string(),
               "--translit-table-out", table.string(), "--comments", "600", "--seed", "12",
               "--translit-rate", "0.25"}) == 0);

  // The inverse table doubles as the English-direction hook in tests.
  const fs::path english = dir / "english.tsv";
  {
    std::ifstream in(table);
    std::ofstream out(english, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      out << line.substr(tab + 1) << '\t' << line.substr(0, tab) << '\n';
    }
  }

  const auto count_rows = [&](const fs::path& report) {
    std::istringstream in(slurp(report));
    std::string line;
    int rows = -1;  // header
    while (std::getline(in, line)) {
      if (!line.empty()) ++rows;
    }
    return rows;
  };

  const fs::path report4 = dir / "report4.tsv";
  REQUIRE(run({"ablate", "--input", raw.string(), "--report-out", report4.string(),
               "--translit-table", table.string(), "--max-iter", "40", "--seed", "2"}) == 0);
  CHECK(count_rows(report4) == 4);

  const fs::path report5 = dir / "report5.tsv";
  REQUIRE(run({"ablate", "--input", raw.string(), "--report-out", report5.string(),
               "--translit-table", table.string(), "--english-translit-table", english.string(),
               "--max-iter", "40", "--seed", "2"}) == 0);
  CHECK(count_rows(report5) == 5);
  CHECK(slurp(report5).find("Cleaned + English Transliteration Dataset") != std::string::npos);
}

TEST_CASE("config file supplies defaults, flags win") {
  const fs::path dir = work_dir() / "config";
  fs::create_directories(dir);
  const fs::path raw = dir / "raw.csv";
  const fs::path groups = dir / "groups.tsv";
  REQUIRE(run({"generate", "--output", raw.string(), "--groups-out", groups.string(),
               "--comments", "400", "--seed", "6"}) == 0);
  const fs::path cleaned = dir / "cleaned.csv";
  REQUIRE(run({"clean", "--input", raw.string(), "--output", cleaned.string()}) == 0);

  const fs::path config = dir / "spell.conf";
  {
    std::ofstream out(config);
    out << "# spell settings\nmin-abusive-freq=3\nmin-length=5\n";
  }
  const fs::path model_cfg = dir / "model_cfg.json";
  REQUIRE(run({"train-spell", "--input", cleaned.string(), "--model-out", model_cfg.string(),
               "--config", config.string()}) == 0);
  CHECK(load_model(model_cfg).config.min_abusive_frequency == 3);
  CHECK(load_model(model_cfg).config.min_length == 5);

  const fs::path model_flag = dir / "model_flag.json";
  REQUIRE(run({"train-spell", "--input", cleaned.string(), "--model-out", model_flag.string(),
               "--config", config.string(), "--min-abusive-freq", "7"}) == 0);
  CHECK(load_model(model_flag).config.min_abusive_frequency == 7);  // flag beats config
  CHECK(load_model(model_flag).config.min_length == 5);
}

TEST_CASE("train-spell on a corpus with nothing passing filters writes an empty model") {
  const fs::path dir = work_dir() / "empty_model";
  fs::create_directories(dir);
  const fs::path input = dir / "tiny.csv";
  {
    std::ofstream out(input);
    out << "comment_id,post_id,text,language,comment_likes,comment_reports,post_likes,"
           "post_reports,label\n"
           "c1,p1,ek do teen,hi,0,0,0,0,1\n"
           "c2,p1,chaar paanch,hi,0,0,0,0,0\n";
  }
  const fs::path model = dir / "model.json";
  CHECK(run({"train-spell", "--input", input.string(), "--model-out", model.string()}) == 0);
  CHECK(load_model(model).clusters.empty());
}

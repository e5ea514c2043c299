#include "cmtk/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cmtk/error.hpp"

namespace cmtk {

namespace {

constexpr const char* kColumns[] = {"comment_id",    "post_id",         "text",
                                    "language",      "comment_likes",   "comment_reports",
                                    "post_likes",    "post_reports",    "label"};
constexpr int kNumColumns = 9;

// RFC 4180 record reader; quoted fields may contain separators and newlines.
// Returns false at end of input. `line_no` tracks the record's first line.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, int& line_no,
                     int& next_line, const std::string& where) {
  fields.clear();
  int c = in.peek();
  if (c == EOF) return false;
  line_no = next_line;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  while ((c = in.get()) != EOF) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++next_line;
        field.push_back(static_cast<char>(c));
      }
    } else if (c == '"') {
      if (!field.empty()) {
        throw ParseError(where + ":" + std::to_string(next_line) +
                         ": stray quote inside unquoted field");
      }
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      ++next_line;
      break;
    } else if (c == '\n') {
      ++next_line;
      break;
    } else {
      field.push_back(static_cast<char>(c));
    }
  }
  if (in_quotes) {
    throw ParseError(where + ":" + std::to_string(line_no) + ": unterminated quoted field");
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::int64_t parse_count(const std::string& s, const std::string& column, const std::string& where,
                         int line_no) {
  if (s.empty()) {
    throw ParseError(where + ":" + std::to_string(line_no) + ": empty " + column);
  }
  std::int64_t value = 0;
  std::size_t i = 0;
  bool negative = false;
  if (s[0] == '-') {
    negative = true;
    i = 1;
  }
  if (i == s.size()) {
    throw ParseError(where + ":" + std::to_string(line_no) + ": non-integer " + column + " '" + s +
                     "'");
  }
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') {
      throw ParseError(where + ":" + std::to_string(line_no) + ": non-integer " + column + " '" +
                       s + "'");
    }
    value = value * 10 + (s[i] - '0');
  }
  if (negative) {
    throw ValidationError(where + ":" + std::to_string(line_no) + ": negative " + column + " '" +
                          s + "'");
  }
  return value;
}

int parse_label(const std::string& s, const std::string& where, int line_no) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  throw ValidationError(where + ":" + std::to_string(line_no) + ": label must be 0 or 1, got '" +
                        s + "'");
}

void check_duplicate(std::set<std::string>& seen, const std::string& id, const std::string& where,
                     int line_no) {
  if (!seen.insert(id).second) {
    throw ValidationError(where + ":" + std::to_string(line_no) + ": duplicate comment_id '" + id +
                          "'");
  }
}

Corpus ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file: " + path.string());
  const std::string where = path.string();

  std::vector<std::string> fields;
  int line_no = 1;
  int next_line = 1;
  if (!read_csv_record(in, fields, line_no, next_line, where)) {
    throw SchemaError(where + ": empty file, expected a header row");
  }
  std::map<std::string, int> position;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string& name = fields[i];
    bool known = false;
    for (const char* col : kColumns) known = known || name == col;
    if (!known) {
      std::cerr << "warning: " << where << ": ignoring unknown column '" << name << "'\n";
      continue;
    }
    position[name] = static_cast<int>(i);
  }
  for (const char* col : kColumns) {
    if (!position.count(col)) {
      throw SchemaError(where + ": missing required column '" + std::string(col) + "'");
    }
  }

  Corpus corpus;
  std::set<std::string> seen_ids;
  while (read_csv_record(in, fields, line_no, next_line, where)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (static_cast<int>(fields.size()) < kNumColumns) {
      throw ParseError(where + ":" + std::to_string(line_no) + ": expected at least " +
                       std::to_string(kNumColumns) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const auto field = [&](const char* name) -> const std::string& {
      return fields[static_cast<std::size_t>(position.at(name))];
    };
    Comment c;
    c.comment_id = field("comment_id");
    c.post_id = field("post_id");
    c.text = field("text");
    c.language = field("language");
    c.comment_likes = parse_count(field("comment_likes"), "comment_likes", where, line_no);
    c.comment_reports = parse_count(field("comment_reports"), "comment_reports", where, line_no);
    c.post_likes = parse_count(field("post_likes"), "post_likes", where, line_no);
    c.post_reports = parse_count(field("post_reports"), "post_reports", where, line_no);
    c.label = parse_label(field("label"), where, line_no);
    check_duplicate(seen_ids, c.comment_id, where, line_no);
    corpus.comments.push_back(std::move(c));
  }
  return corpus;
}

Corpus ingest_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file: " + path.string());
  const std::string where = path.string();

  Corpus corpus;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw ParseError(where + ":" + std::to_string(line_no) + ": expected a JSON object");
    }
    for (const auto& [key, _] : obj.items()) {
      bool known = false;
      for (const char* col : kColumns) known = known || key == col;
      if (!known) {
        std::cerr << "warning: " << where << ":" << line_no << ": ignoring unknown field '" << key
                  << "'\n";
      }
    }
    for (const char* col : kColumns) {
      if (!obj.contains(col)) {
        throw SchemaError(where + ":" + std::to_string(line_no) + ": missing required field '" +
                          std::string(col) + "'");
      }
    }
    const auto str = [&](const char* name) -> std::string {
      const auto& v = obj.at(name);
      if (!v.is_string()) {
        throw ParseError(where + ":" + std::to_string(line_no) + ": field '" + name +
                         "' must be a string");
      }
      return v.get<std::string>();
    };
    const auto count = [&](const char* name) -> std::int64_t {
      const auto& v = obj.at(name);
      if (!v.is_number_integer()) {
        throw ParseError(where + ":" + std::to_string(line_no) + ": non-integer " + name);
      }
      const std::int64_t n = v.get<std::int64_t>();
      if (n < 0) {
        throw ValidationError(where + ":" + std::to_string(line_no) + ": negative " + name);
      }
      return n;
    };
    Comment c;
    c.comment_id = str("comment_id");
    c.post_id = str("post_id");
    c.text = str("text");
    c.language = str("language");
    c.comment_likes = count("comment_likes");
    c.comment_reports = count("comment_reports");
    c.post_likes = count("post_likes");
    c.post_reports = count("post_reports");
    const auto& label = obj.at("label");
    if (!label.is_number_integer()) {
      throw ValidationError(where + ":" + std::to_string(line_no) + ": label must be 0 or 1");
    }
    const std::int64_t l = label.get<std::int64_t>();
    if (l != 0 && l != 1) {
      throw ValidationError(where + ":" + std::to_string(line_no) + ": label must be 0 or 1, got " +
                            std::to_string(l));
    }
    c.label = static_cast<int>(l);
    check_duplicate(seen_ids, c.comment_id, where, line_no);
    corpus.comments.push_back(std::move(c));
  }
  return corpus;
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

CorpusFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return CorpusFormat::Csv;
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::Jsonl;
  throw ConfigError("cannot infer corpus format from extension '" + ext +
                    "' (use .csv or .jsonl): " + path.string());
}

Corpus ingest(const std::filesystem::path& path, CorpusFormat format) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("input file does not exist: " + path.string());
  }
  return format == CorpusFormat::Csv ? ingest_csv(path) : ingest_jsonl(path);
}

Corpus ingest(const std::filesystem::path& path) {
  return ingest(path, format_from_extension(path));
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  if (format == CorpusFormat::Csv) {
    out << "comment_id,post_id,text,language,comment_likes,comment_reports,"
           "post_likes,post_reports,label\n";
    for (const Comment& c : corpus.comments) {
      out << csv_escape(c.comment_id) << ',' << csv_escape(c.post_id) << ','
          << csv_escape(c.text) << ',' << csv_escape(c.language) << ',' << c.comment_likes << ','
          << c.comment_reports << ',' << c.post_likes << ',' << c.post_reports << ',' << c.label
          << '\n';
    }
  } else {
    for (const Comment& c : corpus.comments) {
      nlohmann::ordered_json obj;
      obj["comment_id"] = c.comment_id;
      obj["post_id"] = c.post_id;
      obj["text"] = c.text;
      obj["language"] = c.language;
      obj["comment_likes"] = c.comment_likes;
      obj["comment_reports"] = c.comment_reports;
      obj["post_likes"] = c.post_likes;
      obj["post_reports"] = c.post_reports;
      obj["label"] = c.label;
      out << obj.dump() << '\n';
    }
  }
  if (!out) throw Error("failed writing output file: " + path.string());
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_corpus(corpus, path, format_from_extension(path));
}

Corpus aggregate_post_metadata(const Corpus& corpus) {
  struct Maxima {
    std::int64_t likes = 0;
    std::int64_t reports = 0;
  };
  std::map<std::string, Maxima> by_post;
  for (const Comment& c : corpus.comments) {
    Maxima& m = by_post[c.post_id];
    m.likes = std::max(m.likes, c.post_likes);
    m.reports = std::max(m.reports, c.post_reports);
  }
  Corpus out = corpus;
  for (Comment& c : out.comments) {
    const Maxima& m = by_post.at(c.post_id);
    c.post_likes = m.likes;
    c.post_reports = m.reports;
  }
  return out;
}

std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, double validation_fraction,
                                           std::uint64_t seed, bool by_language) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must be in (0,1), got " +
                      std::to_string(validation_fraction));
  }
  // Strata in sorted key order so the draw sequence is reproducible.
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.comments.size(); ++i) {
    const Comment& c = corpus.comments[i];
    std::string key = std::to_string(c.label);
    if (by_language) key += "\x1f" + c.language;
    strata[key].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<bool> in_validation(corpus.comments.size(), false);
  for (auto& [key, indices] : strata) {
    // Fisher-Yates with explicit bounded draws; std::shuffle's draw
    // sequence is not pinned by the standard.
    for (std::size_t i = indices.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(indices[i - 1], indices[j]);
    }
    const auto take =
        static_cast<std::size_t>(validation_fraction * static_cast<double>(indices.size()));
    for (std::size_t i = 0; i < take; ++i) in_validation[indices[i]] = true;
  }

  std::pair<Corpus, Corpus> result;
  for (std::size_t i = 0; i < corpus.comments.size(); ++i) {
    (in_validation[i] ? result.second : result.first).comments.push_back(corpus.comments[i]);
  }
  return result;
}

}  // namespace cmtk

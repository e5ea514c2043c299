#include "cmtk/wordgraph.hpp"

#include <algorithm>
#include <sstream>

namespace cmtk {

bool WordGraph::has_edge(int u, int v) const {
  const auto& nbrs = adj[static_cast<std::size_t>(u)];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::string> tokenize(const std::string& text) {
  const std::u32string cps = decode_utf8(case_fold(text));
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t cp : cps) {
    if (is_whitespace(cp)) {
      if (!current.empty()) {
        tokens.push_back(encode_utf8(current));
        current.clear();
      }
    } else {
      current.push_back(cp);
    }
  }
  if (!current.empty()) tokens.push_back(encode_utf8(current));
  return tokens;
}

int count_consonants(const std::string& word, const ScriptProfiles& profiles) {
  return profiles.count_consonants(word);
}

StatsMap count_stats(const Corpus& corpus, const ScriptProfiles& profiles) {
  StatsMap stats;
  for (const Comment& c : corpus.comments) {
    for (const std::string& token : tokenize(c.text)) {
      WordStats& s = stats[token];
      s.frequency += 1;
      if (c.label == 1) s.abusive_frequency += 1;
    }
  }
  for (auto& [word, s] : stats) {
    s.word = word;
    s.length = static_cast<int>(grapheme_length(word));
    s.consonants = profiles.count_consonants(word);
  }
  return stats;
}

WordGraph build_graph(const StatsMap& stats, const GraphConfig& config) {
  WordGraph g;
  for (const auto& [word, s] : stats) {  // map order keeps nodes sorted
    if (s.abusive_frequency >= config.min_abusive_frequency && s.length >= config.min_length &&
        s.consonants >= config.min_consonants) {
      g.index[word] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(word);
      g.freq.push_back(s.frequency);
    }
  }
  g.adj.assign(g.nodes.size(), {});

  // Only words sharing the first-k prefix can be adjacent; bucket first.
  std::map<std::string, std::vector<int>> buckets;
  std::vector<std::u32string> decoded(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    decoded[i] = decode_utf8(g.nodes[i]);
    buckets[grapheme_prefix(g.nodes[i], config.prefix_len)].push_back(static_cast<int>(i));
  }
  for (const auto& [prefix, members] : buckets) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const int u = members[a];
        const int v = members[b];
        if (similarity(decoded[static_cast<std::size_t>(u)],
                       decoded[static_cast<std::size_t>(v)]) >= config.similarity_threshold) {
          g.adj[static_cast<std::size_t>(u)].push_back(v);
          g.adj[static_cast<std::size_t>(v)].push_back(u);
        }
      }
    }
  }
  for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

std::string dump_graph(const WordGraph& graph) {
  std::ostringstream out;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    out << graph.nodes[i] << ':';
    for (std::size_t j = 0; j < graph.adj[i].size(); ++j) {
      out << (j == 0 ? " " : ",") << graph.nodes[static_cast<std::size_t>(graph.adj[i][j])];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cmtk

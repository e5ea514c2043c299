#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cmtk/corpus.hpp"
#include "cmtk/script.hpp"
#include "cmtk/text.hpp"

namespace cmtk {

struct WordStats {
  std::string word;
  std::int64_t frequency = 0;          // occurrences across the whole corpus
  std::int64_t abusive_frequency = 0;  // occurrences in label=1 comments
  int length = 0;                      // grapheme count
  int consonants = 0;
};

// Sorted by word so every downstream walk is deterministic.
using StatsMap = std::map<std::string, WordStats>;

struct GraphConfig {
  std::int64_t min_abusive_frequency = 5;
  int min_length = 6;
  int min_consonants = 4;
  int prefix_len = 3;
  double similarity_threshold = 85.0;

  bool operator==(const GraphConfig&) const = default;
};

// Undirected word graph. Nodes are sorted lexicographically; adjacency
// lists hold sorted node indices; freq mirrors corpus frequency for the
// clique tie-breaks.
struct WordGraph {
  std::vector<std::string> nodes;
  std::vector<std::int64_t> freq;
  std::vector<std::vector<int>> adj;
  std::unordered_map<std::string, int> index;

  std::size_t size() const { return nodes.size(); }
  bool empty() const { return nodes.empty(); }
  bool has_edge(int u, int v) const;
};

// Splits on Unicode whitespace after case-folding; no empty tokens.
std::vector<std::string> tokenize(const std::string& text);

StatsMap count_stats(const Corpus& corpus, const ScriptProfiles& profiles);

int count_consonants(const std::string& word, const ScriptProfiles& profiles);

// Algorithm: nodes are words passing the abusive-frequency/length/consonant
// filters; an edge joins two nodes when they share the first-k grapheme
// prefix and their similarity is at least the threshold. Comparison happens
// within prefix buckets only.
WordGraph build_graph(const StatsMap& stats, const GraphConfig& config);

// Debug dump: `word: neighbor,neighbor,...` lines, lexicographically sorted.
std::string dump_graph(const WordGraph& graph);

}  // namespace cmtk

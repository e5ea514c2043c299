#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cmtk/wordgraph.hpp"

namespace cmtk {

struct AnchorWord {
  std::string word;
  std::int64_t frequency = 0;

  bool operator==(const AnchorWord&) const = default;
};

// One extracted clique with its canonical spelling and inference anchors.
struct Cluster {
  std::vector<std::string> members;  // sorted lexicographically
  std::string parent;
  std::int64_t parent_frequency = 0;
  std::vector<AnchorWord> anchors;  // frequency desc, then word asc
  std::string prefix;               // first-k graphemes of the parent

  bool operator==(const Cluster&) const = default;
};

struct CorrectionModel {
  static constexpr const char* kFormatVersion = "1";

  std::string version = kFormatVersion;
  GraphConfig config;
  std::vector<Cluster> clusters;  // sorted by (prefix, parent)

  bool operator==(const CorrectionModel& other) const;
};

// Maximum-cardinality clique, exact. Ties: larger total member frequency,
// then lexicographically smallest sorted member tuple. Members returned
// sorted. Throws ConfigError on an empty graph.
std::vector<std::string> maximum_clique(const WordGraph& graph);

// Member with the highest corpus frequency; ties to the smallest word.
std::string select_parent(const std::vector<std::string>& members, const StatsMap& stats);

// Top five members by frequency, kept when frequency > parent_frequency/4.
// The parent is always an anchor. Ordered by frequency desc, word asc.
std::vector<AnchorWord> select_anchors(const std::vector<std::string>& members,
                                       const std::string& parent, const StatsMap& stats);

// Algorithm: repeatedly take the maximum clique out of the residual graph,
// record parent/anchors, and continue until no nodes remain. Singleton
// clusters are kept. Output clusters are a partition of the node set.
CorrectionModel extract_clusters(const WordGraph& graph, const StatsMap& stats,
                                 const GraphConfig& config);

void save_model(const CorrectionModel& model, const std::filesystem::path& path);
CorrectionModel load_model(const std::filesystem::path& path);

}  // namespace cmtk

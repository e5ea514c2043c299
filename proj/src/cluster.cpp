#include "cmtk/cluster.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "cmtk/error.hpp"

namespace cmtk {

namespace {

// Fixed-width dynamic bitset over component-local node ids.
using Bits = std::vector<std::uint64_t>;

Bits make_bits(std::size_t n) { return Bits((n + 63) / 64, 0); }

void set_bit(Bits& b, int i) { b[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63); }
void clear_bit(Bits& b, int i) { b[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (i & 63)); }
bool test_bit(const Bits& b, int i) {
  return (b[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
}

bool none(const Bits& b) {
  for (std::uint64_t w : b)
    if (w) return false;
  return true;
}

int popcount(const Bits& b) {
  int n = 0;
  for (std::uint64_t w : b) n += std::popcount(w);
  return n;
}

Bits bits_and(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}

int and_popcount(const Bits& a, const Bits& b) {
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(a[i] & b[i]);
  return n;
}

template <typename Fn>
void for_each_bit(const Bits& b, Fn&& fn) {
  for (std::size_t w = 0; w < b.size(); ++w) {
    std::uint64_t bits = b[w];
    while (bits) {
      const int i = std::countr_zero(bits);
      fn(static_cast<int>(w * 64) + i);
      bits &= bits - 1;
    }
  }
}

// A clique candidate in global node ids, sorted ascending. Node order is
// lexicographic word order, so index tuples compare like word tuples.
struct Candidate {
  std::vector<int> members;
  std::int64_t total_freq = 0;
};

// (cardinality desc, total frequency desc, member tuple asc)
bool better(const Candidate& a, const Candidate& b) {
  if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
  if (a.total_freq != b.total_freq) return a.total_freq > b.total_freq;
  return a.members < b.members;
}

// Exact maximum clique over one connected component: Bron-Kerbosch with
// pivoting, pruned to branches that can still reach the incumbent size.
class ComponentSolver {
 public:
  ComponentSolver(const WordGraph& g, std::vector<int> local_to_global)
      : graph_(g), local_to_global_(std::move(local_to_global)) {
    const std::size_t m = local_to_global_.size();
    std::unordered_map<int, int> global_to_local;
    for (std::size_t i = 0; i < m; ++i) global_to_local[local_to_global_[i]] = static_cast<int>(i);
    nbr_.assign(m, make_bits(m));
    for (std::size_t i = 0; i < m; ++i) {
      for (int g_nbr : g.adj[static_cast<std::size_t>(local_to_global_[i])]) {
        const auto it = global_to_local.find(g_nbr);
        if (it != global_to_local.end()) set_bit(nbr_[i], it->second);
      }
    }
  }

  Candidate solve() {
    Bits p = make_bits(local_to_global_.size());
    for (std::size_t i = 0; i < local_to_global_.size(); ++i) set_bit(p, static_cast<int>(i));
    Bits x = make_bits(local_to_global_.size());
    expand(p, x);
    return best_;
  }

 private:
  void consider_current() {
    Candidate c;
    c.members.reserve(r_.size());
    for (int local : r_) c.members.push_back(local_to_global_[static_cast<std::size_t>(local)]);
    std::sort(c.members.begin(), c.members.end());
    for (int node : c.members) c.total_freq += graph_.freq[static_cast<std::size_t>(node)];
    if (best_.members.empty() || better(c, best_)) best_ = std::move(c);
  }

  void expand(const Bits& p, const Bits& x) {
    if (none(p) && none(x)) {
      consider_current();
      return;
    }
    // Branches that cannot reach the incumbent cardinality die here; equal
    // cardinality keeps going so the tie-break sees every contender.
    if (r_.size() + static_cast<std::size_t>(popcount(p)) < best_.members.size()) return;

    int pivot = -1;
    int pivot_degree = -1;
    const auto try_pivot = [&](int u) {
      const int d = and_popcount(p, nbr_[static_cast<std::size_t>(u)]);
      if (d > pivot_degree) {
        pivot_degree = d;
        pivot = u;
      }
    };
    for_each_bit(p, try_pivot);
    for_each_bit(x, try_pivot);

    std::vector<int> candidates;
    for_each_bit(p, [&](int v) {
      if (!test_bit(nbr_[static_cast<std::size_t>(pivot)], v)) candidates.push_back(v);
    });

    Bits p_work = p;
    Bits x_work = x;
    for (int v : candidates) {
      r_.push_back(v);
      expand(bits_and(p_work, nbr_[static_cast<std::size_t>(v)]),
             bits_and(x_work, nbr_[static_cast<std::size_t>(v)]));
      r_.pop_back();
      clear_bit(p_work, v);
      set_bit(x_work, v);
    }
  }

  const WordGraph& graph_;
  std::vector<int> local_to_global_;
  std::vector<Bits> nbr_;
  std::vector<int> r_;
  Candidate best_;
};

// Connected components of the active subgraph, each sorted, ordered by
// smallest member.
std::vector<std::vector<int>> active_components(const WordGraph& g,
                                                const std::vector<char>& active) {
  std::vector<char> seen(g.size(), 0);
  std::vector<std::vector<int>> components;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (!active[start] || seen[start]) continue;
    std::vector<int> component;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      component.push_back(u);
      for (int v : g.adj[static_cast<std::size_t>(u)]) {
        if (active[static_cast<std::size_t>(v)] && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

Candidate best_clique_over(const WordGraph& g, const std::vector<char>& active) {
  Candidate best;
  for (const auto& component : active_components(g, active)) {
    Candidate c = ComponentSolver(g, component).solve();
    if (best.members.empty() || better(c, best)) best = std::move(c);
  }
  return best;
}

std::int64_t freq_of(const StatsMap& stats, const std::string& word) {
  const auto it = stats.find(word);
  return it == stats.end() ? 0 : it->second.frequency;
}

}  // namespace

std::vector<std::string> maximum_clique(const WordGraph& graph) {
  if (graph.empty()) throw ConfigError("maximum_clique: graph has no nodes");
  const std::vector<char> active(graph.size(), 1);
  const Candidate best = best_clique_over(graph, active);
  std::vector<std::string> words;
  words.reserve(best.members.size());
  for (int node : best.members) words.push_back(graph.nodes[static_cast<std::size_t>(node)]);
  return words;  // node order is lexicographic, so words are sorted
}

std::string select_parent(const std::vector<std::string>& members, const StatsMap& stats) {
  if (members.empty()) throw ConfigError("select_parent: empty member set");
  const std::string* best = nullptr;
  std::int64_t best_freq = -1;
  for (const std::string& w : members) {
    const std::int64_t f = freq_of(stats, w);
    if (f > best_freq || (f == best_freq && w < *best)) {
      best = &w;
      best_freq = f;
    }
  }
  return *best;
}

std::vector<AnchorWord> select_anchors(const std::vector<std::string>& members,
                                       const std::string& parent, const StatsMap& stats) {
  std::vector<AnchorWord> ranked;
  ranked.reserve(members.size());
  for (const std::string& w : members) ranked.push_back({w, freq_of(stats, w)});
  std::sort(ranked.begin(), ranked.end(), [](const AnchorWord& a, const AnchorWord& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.word < b.word;
  });
  if (ranked.size() > 5) ranked.resize(5);

  const std::int64_t parent_freq = freq_of(stats, parent);
  std::vector<AnchorWord> anchors;
  for (const AnchorWord& a : ranked) {
    // Strictly above a quarter of the parent frequency; the parent itself
    // always represents its cluster.
    if (a.word == parent || a.frequency * 4 > parent_freq) anchors.push_back(a);
  }
  return anchors;
}

CorrectionModel extract_clusters(const WordGraph& graph, const StatsMap& stats,
                                 const GraphConfig& config) {
  CorrectionModel model;
  model.config = config;

  std::vector<char> active(graph.size(), 1);
  std::size_t remaining = graph.size();

  const auto emit = [&](std::vector<int> member_ids) {
    Cluster cluster;
    cluster.members.reserve(member_ids.size());
    for (int node : member_ids) {
      cluster.members.push_back(graph.nodes[static_cast<std::size_t>(node)]);
      active[static_cast<std::size_t>(node)] = 0;
    }
    remaining -= member_ids.size();
    cluster.parent = select_parent(cluster.members, stats);
    cluster.parent_frequency = freq_of(stats, cluster.parent);
    cluster.anchors = select_anchors(cluster.members, cluster.parent, stats);
    cluster.prefix = grapheme_prefix(cluster.parent, config.prefix_len);
    model.clusters.push_back(std::move(cluster));
  };

  while (remaining > 0) {
    Candidate best = best_clique_over(graph, active);
    if (best.members.size() <= 1) {
      // Residual graph is edgeless; everything left is a singleton.
      for (std::size_t i = 0; i < graph.size(); ++i) {
        if (active[i]) emit({static_cast<int>(i)});
      }
      break;
    }
    emit(std::move(best.members));
  }

  std::sort(model.clusters.begin(), model.clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.prefix != b.prefix) return a.prefix < b.prefix;
    return a.parent < b.parent;
  });
  return model;
}

bool CorrectionModel::operator==(const CorrectionModel& other) const {
  return version == other.version && config == other.config && clusters == other.clusters;
}

void save_model(const CorrectionModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["version"] = model.version;
  doc["config"] = {{"k", model.config.prefix_len},
                   {"t", model.config.similarity_threshold},
                   {"min_abusive_frequency", model.config.min_abusive_frequency},
                   {"min_length", model.config.min_length},
                   {"min_consonants", model.config.min_consonants}};
  doc["clusters"] = nlohmann::ordered_json::array();
  for (const Cluster& c : model.clusters) {
    nlohmann::ordered_json jc;
    jc["parent"] = c.parent;
    jc["parent_frequency"] = c.parent_frequency;
    jc["prefix"] = c.prefix;
    jc["anchors"] = nlohmann::ordered_json::array();
    for (const AnchorWord& a : c.anchors) {
      jc["anchors"].push_back({{"word", a.word}, {"frequency", a.frequency}});
    }
    jc["members"] = c.members;
    doc["clusters"].push_back(std::move(jc));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open model file for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("failed writing model file: " + path.string());
}

CorrectionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed model file " + path.string() + ": " + e.what());
  }
  try {
    const std::string version = doc.at("version").get<std::string>();
    if (version != CorrectionModel::kFormatVersion) {
      throw IncompatibleModelError("model file " + path.string() + " has format version '" +
                                   version + "', expected '" + CorrectionModel::kFormatVersion +
                                   "'");
    }
    CorrectionModel model;
    model.version = version;
    const auto& config = doc.at("config");
    model.config.prefix_len = config.at("k").get<int>();
    model.config.similarity_threshold = config.at("t").get<double>();
    model.config.min_abusive_frequency = config.at("min_abusive_frequency").get<std::int64_t>();
    model.config.min_length = config.at("min_length").get<int>();
    model.config.min_consonants = config.at("min_consonants").get<int>();
    for (const auto& jc : doc.at("clusters")) {
      Cluster c;
      c.parent = jc.at("parent").get<std::string>();
      c.parent_frequency = jc.at("parent_frequency").get<std::int64_t>();
      c.prefix = jc.at("prefix").get<std::string>();
      for (const auto& ja : jc.at("anchors")) {
        c.anchors.push_back(
            {ja.at("word").get<std::string>(), ja.at("frequency").get<std::int64_t>()});
      }
      c.members = jc.at("members").get<std::vector<std::string>>();
      model.clusters.push_back(std::move(c));
    }
    return model;
  } catch (const IncompatibleModelError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed model file " + path.string() + ": " + e.what());
  }
}

}  // namespace cmtk

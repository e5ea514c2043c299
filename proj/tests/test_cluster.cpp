#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "cmtk/cluster.hpp"
#include "cmtk/error.hpp"
#include "oracles.hpp"

using namespace cmtk;

namespace {

// Graph over synthetic node names w00..wNN with explicit edges. Names are
// zero-padded so index order matches lexicographic order, like build_graph
// output.
WordGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges,
                     const std::vector<std::int64_t>& freq) {
  WordGraph g;
  for (int i = 0; i < n; ++i) {
    char name[8];
    std::snprintf(name, sizeof(name), "w%02d", i);
    g.index[name] = i;
    g.nodes.emplace_back(name);
  }
  g.freq = freq;
  g.adj.assign(static_cast<std::size_t>(n), {});
  for (const auto& [u, v] : edges) {
    g.adj[static_cast<std::size_t>(u)].push_back(v);
    g.adj[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

StatsMap stats_with(const WordGraph& g) {
  StatsMap stats;
  for (std::size_t i = 0; i < g.size(); ++i) {
    WordStats s;
    s.word = g.nodes[i];
    s.frequency = g.freq[i];
    s.abusive_frequency = g.freq[i];
    stats[g.nodes[i]] = s;
  }
  return stats;
}

}  // namespace

TEST_CASE("maximum_clique basics") {
  SUBCASE("triangle plus pendant") {
    const WordGraph g = make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}}, {1, 1, 1, 1});
    CHECK(maximum_clique(g) == std::vector<std::string>{"w00", "w01", "w02"});
  }
  SUBCASE("edgeless graph picks highest frequency, then lexicographic") {
    const WordGraph g = make_graph(3, {}, {5, 9, 9});
    CHECK(maximum_clique(g) == std::vector<std::string>{"w01"});
  }
  SUBCASE("two equal triangles: larger total frequency wins") {
    const WordGraph g =
        make_graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}}, {1, 1, 1, 2, 2, 2});
    CHECK(maximum_clique(g) == std::vector<std::string>{"w03", "w04", "w05"});
  }
  SUBCASE("full tie falls back to lexicographic tuple") {
    const WordGraph g =
        make_graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}}, {2, 2, 2, 2, 2, 2});
    CHECK(maximum_clique(g) == std::vector<std::string>{"w00", "w01", "w02"});
  }
  SUBCASE("empty graph is an error") {
    CHECK_THROWS_AS(maximum_clique(WordGraph{}), ConfigError);
  }
}

TEST_CASE("maximum_clique matches exhaustive enumeration with tie-breaks") {
  std::mt19937_64 rng(424242);
  const double probs[] = {0.2, 0.5, 0.8};
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 14);  // up to 15 nodes
    const double p = probs[trial % 3];
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<bool>> adjacent(static_cast<std::size_t>(n),
                                            std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) {
          edges.emplace_back(u, v);
          adjacent[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
          adjacent[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = true;
        }
      }
    }
    std::vector<std::int64_t> freq;
    for (int i = 0; i < n; ++i) freq.push_back(1 + static_cast<std::int64_t>(rng() % 4));

    const WordGraph g = make_graph(n, edges, freq);
    const std::vector<std::string> got = maximum_clique(g);
    const oracle::CliqueResult expected = oracle::max_clique_bruteforce(n, adjacent, freq);

    std::vector<std::string> expected_words;
    for (int v : expected.members) expected_words.push_back(g.nodes[static_cast<std::size_t>(v)]);
    CHECK(got == expected_words);
  }
}

TEST_CASE("select_parent") {
  const WordGraph g = make_graph(3, {}, {50, 20, 8});
  StatsMap stats = stats_with(g);
  CHECK(select_parent({"w00", "w01", "w02"}, stats) == "w00");
  CHECK(select_parent({"w02"}, stats) == "w02");

  stats["w01"].frequency = 50;  // tie with w00 -> lexicographically smaller
  CHECK(select_parent({"w00", "w01", "w02"}, stats) == "w00");
  CHECK(select_parent({"w01", "w02"}, stats) == "w01");
}

TEST_CASE("select_anchors applies top-5 cut then quarter rule") {
  StatsMap stats;
  const auto put = [&](const std::string& w, std::int64_t f) {
    WordStats s;
    s.word = w;
    s.frequency = f;
    stats[w] = s;
  };
  put("p", 40);
  put("a", 39);
  put("b", 11);
  put("c", 10);
  put("d", 9);
  put("e", 8);

  const auto anchors = select_anchors({"p", "a", "b", "c", "d", "e"}, "p", stats);
  REQUIRE(anchors.size() == 3);
  CHECK(anchors[0].word == "p");
  CHECK(anchors[1].word == "a");
  CHECK(anchors[2].word == "b");  // 11*4 > 40; c is 10*4 == 40, strictly excluded

  SUBCASE("boundary is strict") {
    const auto strict = select_anchors({"p", "q"}, "p", [&] {
      StatsMap s;
      WordStats sp;
      sp.word = "p";
      sp.frequency = 8;
      s["p"] = sp;
      WordStats sq;
      sq.word = "q";
      sq.frequency = 2;  // 2*4 == 8, not strictly above
      s["q"] = sq;
      return s;
    }());
    REQUIRE(strict.size() == 1);
    CHECK(strict[0].word == "p");
  }

  SUBCASE("singleton cluster anchors itself") {
    const auto self = select_anchors({"p"}, "p", stats);
    REQUIRE(self.size() == 1);
    CHECK(self[0].word == "p");
    CHECK(self[0].frequency == 40);
  }

  SUBCASE("zero-frequency parent still anchors itself") {
    StatsMap zero;
    WordStats s;
    s.word = "z";
    zero["z"] = s;
    const auto anchors_zero = select_anchors({"z"}, "z", zero);
    REQUIRE(anchors_zero.size() == 1);
  }
}

TEST_CASE("extract_clusters partitions the node set") {
  // One 4-clique with a 3-node tail hanging off it.
  const WordGraph g = make_graph(
      7, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}},
      {9, 8, 7, 6, 5, 4, 3});
  const StatsMap stats = stats_with(g);
  const CorrectionModel model = extract_clusters(g, stats, GraphConfig{});

  std::set<std::string> covered;
  std::size_t total = 0;
  for (const Cluster& c : model.clusters) {
    total += c.members.size();
    for (const std::string& w : c.members) CHECK(covered.insert(w).second);
    CHECK(std::count(c.members.begin(), c.members.end(), c.parent) == 1);
    bool parent_is_anchor = false;
    for (const AnchorWord& a : c.anchors) parent_is_anchor |= a.word == c.parent;
    CHECK(parent_is_anchor);
    CHECK(c.anchors.size() <= 5);
  }
  CHECK(total == g.size());
  CHECK(covered.size() == g.size());

  // First extraction must be the 4-clique.
  bool found_four = false;
  for (const Cluster& c : model.clusters) {
    found_four |= c.members == std::vector<std::string>{"w00", "w01", "w02", "w03"};
  }
  CHECK(found_four);
}

TEST_CASE("extract_clusters: each clique is a clique of the residual graph") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 12);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng() % 3 == 0) edges.emplace_back(u, v);
      }
    }
    std::vector<std::int64_t> freq;
    for (int i = 0; i < n; ++i) freq.push_back(1 + static_cast<std::int64_t>(rng() % 9));
    const WordGraph g = make_graph(n, edges, freq);
    const StatsMap stats = stats_with(g);
    const CorrectionModel model = extract_clusters(g, stats, GraphConfig{});

    std::size_t total = 0;
    for (const Cluster& c : model.clusters) {
      total += c.members.size();
      // Every pair inside an extracted cluster is adjacent in the original
      // graph (removal only deletes nodes, never edges inside survivors).
      for (std::size_t i = 0; i < c.members.size(); ++i) {
        for (std::size_t j = i + 1; j < c.members.size(); ++j) {
          CHECK(g.has_edge(g.index.at(c.members[i]), g.index.at(c.members[j])));
        }
      }
    }
    CHECK(total == g.size());

    // Determinism.
    const CorrectionModel again = extract_clusters(g, stats, GraphConfig{});
    CHECK(again == model);
  }
}

TEST_CASE("edgeless graph becomes singleton clusters") {
  const WordGraph g = make_graph(3, {}, {1, 2, 3});
  const CorrectionModel model = extract_clusters(g, stats_with(g), GraphConfig{});
  CHECK(model.clusters.size() == 3);
  for (const Cluster& c : model.clusters) {
    CHECK(c.members.size() == 1);
    CHECK(c.parent == c.members[0]);
  }
}

TEST_CASE("empty graph gives an empty model") {
  const CorrectionModel model = extract_clusters(WordGraph{}, StatsMap{}, GraphConfig{});
  CHECK(model.clusters.empty());
}

TEST_CASE("model save/load round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cmtk_cluster_tests";
  fs::create_directories(dir);

  const WordGraph g = make_graph(4, {{0, 1}, {0, 2}, {1, 2}}, {9, 8, 7, 3});
  const CorrectionModel model = extract_clusters(g, stats_with(g), GraphConfig{});

  const fs::path p = dir / "model.json";
  save_model(model, p);
  const CorrectionModel back = load_model(p);
  CHECK(back == model);

  SUBCASE("byte-identical on re-save") {
    const fs::path p2 = dir / "model2.json";
    save_model(back, p2);
    std::ifstream f1(p, std::ios::binary), f2(p2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), {});
    const std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
  }

  SUBCASE("truncated file is a parse error") {
    const fs::path bad = dir / "truncated.json";
    {
      std::ifstream in(p, std::ios::binary);
      std::string content((std::istreambuf_iterator<char>(in)), {});
      std::ofstream out(bad, std::ios::binary);
      out << content.substr(0, content.size() / 2);
    }
    CHECK_THROWS_AS(load_model(bad), ParseError);
  }

  SUBCASE("wrong version is an incompatibility error") {
    const fs::path bad = dir / "version99.json";
    {
      std::ofstream out(bad, std::ios::binary);
      out << R"({"version":"99","config":{"k":3,"t":85.0,"min_abusive_frequency":5,)"
          << R"("min_length":6,"min_consonants":4},"clusters":[]})";
    }
    CHECK_THROWS_AS(load_model(bad), IncompatibleModelError);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "cutrope/graph.hpp"
#include "oracles.hpp"

using namespace cutrope;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

AttackGraph fig4() { return parse_graph(slurp(std::string(CUTROPE_FIXTURE_DIR) + "/fig4.json")); }

std::vector<std::string> path_labels(const PathEnumeration& e) {
  std::vector<std::string> out;
  for (const AttackPath& p : e.paths) out.push_back(p.label());
  return out;
}

bool walkable(const AttackGraph& g, const std::vector<std::string>& ids) {
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const auto& succ = g.successors(NodeId(ids[i]));
    if (!std::binary_search(succ.begin(), succ.end(), NodeId(ids[i + 1]))) return false;
  }
  return true;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io;
}

}  // namespace

TEST_CASE("minimal two-node document parses") {
  AttackGraph g = parse_graph(
      R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[{"src":"1","dst":"9"}],"entry":"1","target":"9"})");
  CHECK(g.nodes().size() == 2);
  CHECK(g.edges().size() == 1);
  CHECK(g.entry().str() == "1");
  CHECK(g.target().str() == "9");
  CHECK(validate(g).empty());
}

TEST_CASE("entry equal to target is rejected") {
  Errc c = code_of([] {
    parse_graph(
        R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[{"src":"1","dst":"9"}],"entry":"9","target":"9"})");
  });
  CHECK(c == Errc::entry_equals_target);
}

TEST_CASE("structural errors carry specific codes") {
  CHECK(code_of([] {
          parse_graph(R"({"nodes":[{"id":"1"},{"id":"1"},{"id":"9"}],"edges":[],"entry":"1","target":"9"})");
        }) == Errc::duplicate_node);
  CHECK(code_of([] {
          parse_graph(R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[{"src":"1","dst":"z"}],"entry":"1","target":"9"})");
        }) == Errc::unknown_node);
  CHECK(code_of([] {
          parse_graph(R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[],"entry":"1"})");
        }) == Errc::missing_field);
  CHECK(code_of([] {
          parse_graph(R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[],"entry":"1","target":"9","extra":1})");
        }) == Errc::unknown_field);
  CHECK(code_of([] {
          parse_graph(R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[{"src":"1","dst":"1"}],"entry":"1","target":"9"})");
        }) == Errc::self_loop);
  CHECK(code_of([] {
          parse_graph(
              R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[{"src":"1","dst":"9"},{"src":"1","dst":"9"}],"entry":"1","target":"9"})");
        }) == Errc::duplicate_edge);
  CHECK(code_of([] { parse_graph(R"({"nodes":[{"id":""}]})"); }) == Errc::syntax_error);
}

TEST_CASE("syntax errors report line and offset") {
  try {
    parse_graph("{\n  \"nodes\": [\n");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::syntax_error);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
}

TEST_CASE("fig4 reconstruction fixture is valid and matches its path table") {
  AttackGraph g = fig4();
  CHECK(g.nodes().size() == 9);
  CHECK(g.edges().size() == 9);

  // Every route listed for this topology is walkable, including the two
  // partial ones that stop before the target.
  CHECK(walkable(g, {"1", "2", "4", "7", "9"}));
  CHECK(walkable(g, {"1", "2", "3", "6", "8", "9"}));
  CHECK(walkable(g, {"1", "2", "4", "7", "8", "9"}));
  CHECK(walkable(g, {"1", "2", "4"}));
  CHECK(walkable(g, {"1", "2", "4", "7"}));

  // Node 5 has no incident edges: flagged, but not a failure.
  std::vector<Diagnostic> diags = validate(g);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == kDiagUnreachableNode);
  CHECK(diags[0].subject == "5");
}

TEST_CASE("validate flags unreachable nodes and targets") {
  AttackGraph isolated = parse_graph(
      R"({"nodes":[{"id":"1"},{"id":"9"},{"id":"x"}],"edges":[{"src":"1","dst":"9"}],"entry":"1","target":"9"})");
  std::vector<Diagnostic> diags = validate(isolated);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == kDiagUnreachableNode);
  CHECK(diags[0].subject == "x");

  AttackGraph no_path = parse_graph(
      R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[],"entry":"1","target":"9"})");
  diags = validate(no_path);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == kDiagTargetUnreachable);
}

TEST_CASE("minimal graph has the single edge path") {
  AttackGraph g = parse_graph(
      R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[{"src":"1","dst":"9"}],"entry":"1","target":"9"})");
  PathEnumeration e = enumerate_paths(g);
  CHECK(path_labels(e) == std::vector<std::string>{"1->9"});
  CHECK_FALSE(e.truncated);
}

TEST_CASE("fig4 enumeration finds exactly the three complete paths") {
  PathEnumeration e = enumerate_paths(fig4());
  CHECK(path_labels(e) == std::vector<std::string>{
                              "1->2->3->6->8->9", "1->2->4->7->8->9", "1->2->4->7->9"});
  CHECK_FALSE(e.truncated);
  CHECK(oracles::count_simple_paths(fig4()) == 3);
}

TEST_CASE("diamond paths come out in lexicographic order") {
  AttackGraph g = parse_graph(
      R"({"nodes":[{"id":"1"},{"id":"9"},{"id":"a"},{"id":"b"}],
          "edges":[{"src":"1","dst":"a"},{"src":"1","dst":"b"},{"src":"a","dst":"9"},{"src":"b","dst":"9"}],
          "entry":"1","target":"9"})");
  PathEnumeration e = enumerate_paths(g);
  CHECK(path_labels(e) == std::vector<std::string>{"1->a->9", "1->b->9"});

  PathEnumeration truncated = enumerate_paths(g, 1);
  CHECK(path_labels(truncated) == std::vector<std::string>{"1->a->9"});
  CHECK(truncated.truncated);
}

TEST_CASE("enumeration on an unreachable target throws") {
  AttackGraph g = parse_graph(
      R"({"nodes":[{"id":"1"},{"id":"9"}],"edges":[],"entry":"1","target":"9"})");
  CHECK(code_of([&] { enumerate_paths(g); }) == Errc::target_unreachable);
}

namespace {

// Random graph over `n` nodes: node "0" entry, node with the largest id the
// target; cyclic edges allowed when `allow_cycles`.
AttackGraph random_graph(std::mt19937_64& rng, int n, bool allow_cycles,
                         double edge_prob) {
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i) {
    nodes.push_back({NodeId("n" + std::to_string(i)), "node " + std::to_string(i)});
  }
  std::vector<Edge> edges;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!allow_cycles && j < i) continue;
      if (unif(rng) < edge_prob) edges.push_back({nodes[static_cast<std::size_t>(i)].id,
                                                  nodes[static_cast<std::size_t>(j)].id});
    }
  }
  return AttackGraph(std::move(nodes), std::move(edges), NodeId("n0"),
                     NodeId("n" + std::to_string(n - 1)));
}

}  // namespace

TEST_CASE("round-trip: parse(serialize(g)) == g") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    AttackGraph g = random_graph(rng, 2 + trial % 7, trial % 2 == 0, 0.4);
    std::string text = serialize_graph(g);
    CHECK(parse_graph(text) == g);
    CHECK(serialize_graph(parse_graph(text)) == text);  // canonical fixed point
    CHECK(text.find("\r") == std::string::npos);
  }
}

TEST_CASE("enumerated paths satisfy the path invariants on random graphs") {
  std::mt19937_64 rng(11);
  int complete_checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    AttackGraph g = random_graph(rng, 3 + trial % 6, trial % 3 != 0, 0.45);
    PathEnumeration e;
    try {
      e = enumerate_paths(g, 64);
    } catch (const Error& err) {
      CHECK(err.code() == Errc::target_unreachable);
      CHECK(oracles::count_simple_paths(g) == 0);
      continue;
    }
    std::vector<std::string> labels = path_labels(e);
    CHECK(std::is_sorted(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
      return a < b;
    }));
    for (const AttackPath& p : e.paths) {
      CHECK(p.nodes.front() == g.entry());
      CHECK(p.nodes.back() == g.target());
      std::set<NodeId> distinct(p.nodes.begin(), p.nodes.end());
      CHECK(distinct.size() == p.nodes.size());
      std::vector<std::string> ids;
      for (const NodeId& n : p.nodes) ids.push_back(n.str());
      CHECK(walkable(g, ids));
    }
    if (!e.truncated) {
      CHECK(oracles::count_simple_paths(g) == e.paths.size());
      ++complete_checked;
    }
  }
  CHECK(complete_checked > 20);  // the completeness oracle actually ran
}

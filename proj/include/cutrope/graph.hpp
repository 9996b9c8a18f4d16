#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cutrope/error.hpp"

namespace cutrope {

// Identifier token for a graph node: non-empty, letters/digits/underscore/
// hyphen only. Ordered lexicographically; that order drives every
// deterministic listing in the pipeline (canonical serialization, path
// enumeration, tie-breaking).
class NodeId {
public:
  NodeId() = default;
  explicit NodeId(std::string id);  // throws Errc::syntax_error on a bad token

  const std::string& str() const { return id_; }

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;

private:
  std::string id_;
};

struct Node {
  NodeId id;
  std::string label;  // free text, empty when absent

  bool operator==(const Node&) const = default;
};

struct Edge {
  NodeId src;
  NodeId dst;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

// Directed attack graph with designated entry and target nodes. Immutable
// after construction. Construction enforces the structural invariants:
// unique node ids, edges between declared nodes, no self-loops or duplicate
// edges, entry != target, both present. Reachability is validate()'s job.
class AttackGraph {
public:
  AttackGraph(std::vector<Node> nodes, std::vector<Edge> edges, NodeId entry,
              NodeId target);

  const std::vector<Node>& nodes() const { return nodes_; }   // sorted by id
  const std::vector<Edge>& edges() const { return edges_; }   // sorted by (src,dst)
  const NodeId& entry() const { return entry_; }
  const NodeId& target() const { return target_; }

  bool has_node(const NodeId& id) const;
  const Node* find_node(const NodeId& id) const;
  // Successors in ascending id order; empty for sink nodes.
  const std::vector<NodeId>& successors(const NodeId& id) const;

  friend bool operator==(const AttackGraph&, const AttackGraph&) = default;

private:
  std::size_t index_of(const NodeId& id) const;  // nodes_.size() when absent

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  NodeId entry_;
  NodeId target_;
  std::vector<std::vector<NodeId>> adjacency_;  // aligned with nodes_
};

// Simple entry-to-target walk: the attacker's pure strategy.
struct AttackPath {
  std::vector<NodeId> nodes;

  std::string label() const;  // "1->2->9"

  bool operator==(const AttackPath&) const = default;
};

// Raw graph document, before invariant enforcement. extract_graph repairs
// provider output at this level (dropping dangling edges) before assembly.
struct GraphDoc {
  struct DocNode {
    std::string id;
    std::string label;
  };
  struct DocEdge {
    std::string src;
    std::string dst;
  };
  std::vector<DocNode> nodes;
  std::vector<DocEdge> edges;
  std::string entry;
  std::string target;
};

// Document shape only: JSON object with fields nodes/edges/entry/target,
// unknown fields rejected. Syntax errors carry line and byte offset.
GraphDoc parse_graph_document(const std::string& text);

AttackGraph assemble_graph(const GraphDoc& doc);

inline AttackGraph parse_graph(const std::string& text) {
  return assemble_graph(parse_graph_document(text));
}

// Canonical form: keys nodes/edges/entry/target in that order, arrays sorted
// by id and (src,dst), two-space indent, LF endings, trailing newline.
// parse_graph(serialize_graph(g)) == g.
std::string serialize_graph(const AttackGraph& g);

inline constexpr const char* kDiagTargetUnreachable = "TARGET_UNREACHABLE";
inline constexpr const char* kDiagUnreachableNode = "UNREACHABLE_NODE";

// Reachability diagnostics: TARGET_UNREACHABLE when no entry-to-target path
// exists, UNREACHABLE_NODE for every other node the entry cannot reach.
// Empty result means the graph is fully usable.
std::vector<Diagnostic> validate(const AttackGraph& g);

inline constexpr std::size_t kDefaultMaxPaths = 256;

struct PathEnumeration {
  std::vector<AttackPath> paths;  // lexicographic by node-id sequence
  bool truncated = false;         // PATH_LIMIT_EXCEEDED: more paths exist
};

// All simple entry-to-target paths in lexicographic order, truncated to
// max_paths. Throws Errc::target_unreachable when no path exists.
PathEnumeration enumerate_paths(const AttackGraph& g,
                                std::size_t max_paths = kDefaultMaxPaths);

}  // namespace cutrope

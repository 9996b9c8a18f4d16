#include "cutrope/graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

#include <json.hpp>

namespace cutrope {

namespace {

bool valid_id_token(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (!std::isalnum(c) && c != '_' && c != '-') return false;
  }
  return true;
}

// Line/column of a byte offset, for parse error messages.
std::pair<std::size_t, std::size_t> line_of_offset(const std::string& text,
                                                   std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void reject_unknown_keys(const nlohmann::json& obj,
                         std::initializer_list<const char*> allowed,
                         const char* context) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(Errc::unknown_field, std::string("unknown field \"") + key + "\" in " + context);
  }
}

std::string require_string(const nlohmann::json& obj, const char* key,
                           const char* context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(Errc::missing_field, std::string("missing field \"") + key + "\" in " + context);
  }
  if (!it->is_string()) {
    fail(Errc::syntax_error, std::string("field \"") + key + "\" in " + context + " must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

NodeId::NodeId(std::string id) : id_(std::move(id)) {
  if (!valid_id_token(id_)) {
    fail(Errc::syntax_error,
         "invalid node id \"" + id_ + "\" (want letters, digits, underscore, hyphen)");
  }
}

AttackGraph::AttackGraph(std::vector<Node> nodes, std::vector<Edge> edges,
                         NodeId entry, NodeId target)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      entry_(std::move(entry)),
      target_(std::move(target)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].id == nodes_[i - 1].id) {
      fail(Errc::duplicate_node, "duplicate node id \"" + nodes_[i].id.str() + "\"");
    }
  }
  if (!has_node(entry_)) fail(Errc::unknown_node, "entry \"" + entry_.str() + "\" is not a declared node");
  if (!has_node(target_)) fail(Errc::unknown_node, "target \"" + target_.str() + "\" is not a declared node");
  if (entry_ == target_) fail(Errc::entry_equals_target, "entry equals target (\"" + entry_.str() + "\")");

  std::sort(edges_.begin(), edges_.end());
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.src == e.dst) fail(Errc::self_loop, "self-loop on \"" + e.src.str() + "\"");
    if (i > 0 && e == edges_[i - 1]) {
      fail(Errc::duplicate_edge, "duplicate edge " + e.src.str() + "->" + e.dst.str());
    }
    std::size_t si = index_of(e.src);
    if (si == nodes_.size()) fail(Errc::unknown_node, "edge references unknown node \"" + e.src.str() + "\"");
    if (index_of(e.dst) == nodes_.size()) {
      fail(Errc::unknown_node, "edge references unknown node \"" + e.dst.str() + "\"");
    }
    adjacency_[si].push_back(e.dst);  // edges_ sorted, so successor lists are too
  }
}

std::size_t AttackGraph::index_of(const NodeId& id) const {
  auto it = std::lower_bound(
      nodes_.begin(), nodes_.end(), id,
      [](const Node& n, const NodeId& key) { return n.id < key; });
  if (it == nodes_.end() || it->id != id) return nodes_.size();
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool AttackGraph::has_node(const NodeId& id) const {
  return index_of(id) != nodes_.size();
}

const Node* AttackGraph::find_node(const NodeId& id) const {
  std::size_t i = index_of(id);
  return i == nodes_.size() ? nullptr : &nodes_[i];
}

const std::vector<NodeId>& AttackGraph::successors(const NodeId& id) const {
  std::size_t i = index_of(id);
  if (i == nodes_.size()) fail(Errc::unknown_node, "no node \"" + id.str() + "\"");
  return adjacency_[i];
}

std::string AttackPath::label() const {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) out += "->";
    out += nodes[i].str();
  }
  return out;
}

GraphDoc parse_graph_document(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(Errc::syntax_error, "graph document is not valid JSON (line " +
                                 std::to_string(line) + ", offset " +
                                 std::to_string(col) + "): " + e.what());
  }
  if (!j.is_object()) fail(Errc::syntax_error, "graph document must be a JSON object");
  reject_unknown_keys(j, {"nodes", "edges", "entry", "target"}, "graph document");

  GraphDoc doc;
  auto nodes_it = j.find("nodes");
  if (nodes_it == j.end()) fail(Errc::missing_field, "missing field \"nodes\" in graph document");
  if (!nodes_it->is_array()) fail(Errc::syntax_error, "\"nodes\" must be an array");
  for (const auto& n : *nodes_it) {
    if (!n.is_object()) fail(Errc::syntax_error, "node entries must be objects");
    reject_unknown_keys(n, {"id", "label"}, "node");
    GraphDoc::DocNode dn;
    dn.id = require_string(n, "id", "node");
    if (auto it = n.find("label"); it != n.end()) {
      if (!it->is_string()) fail(Errc::syntax_error, "node label must be a string");
      dn.label = it->get<std::string>();
    }
    doc.nodes.push_back(std::move(dn));
  }

  auto edges_it = j.find("edges");
  if (edges_it == j.end()) fail(Errc::missing_field, "missing field \"edges\" in graph document");
  if (!edges_it->is_array()) fail(Errc::syntax_error, "\"edges\" must be an array");
  for (const auto& e : *edges_it) {
    if (!e.is_object()) fail(Errc::syntax_error, "edge entries must be objects");
    reject_unknown_keys(e, {"src", "dst"}, "edge");
    doc.edges.push_back({require_string(e, "src", "edge"), require_string(e, "dst", "edge")});
  }

  doc.entry = require_string(j, "entry", "graph document");
  doc.target = require_string(j, "target", "graph document");
  return doc;
}

AttackGraph assemble_graph(const GraphDoc& doc) {
  std::vector<Node> nodes;
  nodes.reserve(doc.nodes.size());
  for (const auto& n : doc.nodes) nodes.push_back({NodeId(n.id), n.label});
  std::vector<Edge> edges;
  edges.reserve(doc.edges.size());
  for (const auto& e : doc.edges) edges.push_back({NodeId(e.src), NodeId(e.dst)});
  return AttackGraph(std::move(nodes), std::move(edges), NodeId(doc.entry),
                     NodeId(doc.target));
}

std::string serialize_graph(const AttackGraph& g) {
  nlohmann::ordered_json j;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const Node& n : g.nodes()) {  // already sorted by id
    nlohmann::ordered_json jn;
    jn["id"] = n.id.str();
    if (!n.label.empty()) jn["label"] = n.label;
    nodes.push_back(std::move(jn));
  }
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) {  // already sorted by (src, dst)
    nlohmann::ordered_json je;
    je["src"] = e.src.str();
    je["dst"] = e.dst.str();
    edges.push_back(std::move(je));
  }
  j["entry"] = g.entry().str();
  j["target"] = g.target().str();
  return j.dump(2) + "\n";
}

std::vector<Diagnostic> validate(const AttackGraph& g) {
  std::set<NodeId> reached;
  std::vector<NodeId> frontier{g.entry()};
  reached.insert(g.entry());
  while (!frontier.empty()) {
    NodeId cur = frontier.back();
    frontier.pop_back();
    for (const NodeId& next : g.successors(cur)) {
      if (reached.insert(next).second) frontier.push_back(next);
    }
  }

  std::vector<Diagnostic> diags;
  if (!reached.contains(g.target())) {
    diags.push_back({kDiagTargetUnreachable, g.target().str(),
                     "no path from entry \"" + g.entry().str() + "\" to target \"" +
                         g.target().str() + "\""});
  }
  for (const Node& n : g.nodes()) {
    if (n.id == g.target()) continue;  // covered by TARGET_UNREACHABLE
    if (!reached.contains(n.id)) {
      diags.push_back({kDiagUnreachableNode, n.id.str(),
                       "node \"" + n.id.str() + "\" is unreachable from the entry"});
    }
  }
  return diags;
}

namespace {

// Depth-first enumeration; successors are pre-sorted by id, so paths come out
// in lexicographic order of their node sequences.
bool dfs_paths(const AttackGraph& g, const NodeId& cur, std::vector<NodeId>& stack,
               std::set<NodeId>& visited, std::size_t max_paths,
               PathEnumeration& out) {
  if (cur == g.target()) {
    if (out.paths.size() == max_paths) {
      out.truncated = true;
      return false;  // stop the whole search
    }
    out.paths.push_back({stack});
    return true;
  }
  for (const NodeId& next : g.successors(cur)) {
    if (visited.contains(next)) continue;
    visited.insert(next);
    stack.push_back(next);
    bool keep_going = dfs_paths(g, next, stack, visited, max_paths, out);
    stack.pop_back();
    visited.erase(next);
    if (!keep_going) return false;
  }
  return true;
}

}  // namespace

PathEnumeration enumerate_paths(const AttackGraph& g, std::size_t max_paths) {
  if (max_paths < 1) fail(Errc::empty_strategy_set, "max_paths must be at least 1");
  PathEnumeration out;
  std::vector<NodeId> stack{g.entry()};
  std::set<NodeId> visited{g.entry()};
  dfs_paths(g, g.entry(), stack, visited, max_paths, out);
  if (out.paths.empty()) {
    fail(Errc::target_unreachable,
         "no path from entry \"" + g.entry().str() + "\" to target \"" + g.target().str() + "\"");
  }
  return out;
}

}  // namespace cutrope

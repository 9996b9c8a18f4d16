#include "cutrope/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "cutrope/sha256.hpp"

namespace cutrope {

namespace {

std::string read_file_or_throw(const std::string& path, Errc code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(code, "cannot read \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ReplayProvider::ReplayProvider(std::string fixture_dir) : dir_(std::move(fixture_dir)) {}

std::string ReplayProvider::request_key(const ProviderRequest& request) {
  return sha256_hex(request.instruction + "\x1e" + request.logs);
}

std::string ReplayProvider::fixture_filename(const ProviderRequest& request) {
  return request_key(request) + ".txt";
}

std::string ReplayProvider::complete(const ProviderRequest& request) {
  std::string path = dir_ + "/" + fixture_filename(request);
  std::string body = read_file_or_throw(path, Errc::provider_failure);
  if (body.size() > request.byte_budget) {
    fail(Errc::provider_failure, "fixture response exceeds the byte budget");
  }
  return body;
}

RemoteConfig RemoteConfig::from_env() {
  const char* url = std::getenv("CUTROPE_PROVIDER_URL");
  const char* token = std::getenv("CUTROPE_PROVIDER_TOKEN");
  const char* model = std::getenv("CUTROPE_PROVIDER_MODEL");
  if (url == nullptr || *url == '\0') fail(Errc::config, "CUTROPE_PROVIDER_URL is not set");
  if (token == nullptr || *token == '\0') fail(Errc::config, "CUTROPE_PROVIDER_TOKEN is not set");
  RemoteConfig cfg;
  cfg.base_url = url;
  cfg.token = token;
  cfg.model = (model != nullptr && *model != '\0') ? model : "default";
  return cfg;
}

RemoteProvider::RemoteProvider(RemoteConfig config) : config_(std::move(config)) {}

std::string RemoteProvider::complete(const ProviderRequest& request) {
  // Split the base URL into origin and path prefix.
  std::string url = config_.base_url;
  std::size_t scheme_end = url.find("://");
  std::size_t path_start = scheme_end == std::string::npos
                               ? url.find('/')
                               : url.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (prefix.ends_with('/')) prefix.pop_back();

  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array({
      nlohmann::json{{"role", "system"}, {"content", request.instruction}},
      nlohmann::json{{"role", "user"}, {"content", request.logs}},
  });
  body["temperature"] = 0;

  httplib::Client client(origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  httplib::Headers headers{{"Authorization", "Bearer " + config_.token}};
  auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) fail(Errc::provider_failure, "provider request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    fail(Errc::provider_failure, "provider returned HTTP " + std::to_string(res->status));
  }
  if (res->body.size() > request.byte_budget) {
    fail(Errc::provider_failure, "provider response exceeds the byte budget");
  }

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    fail(Errc::provider_failure, "provider response is not JSON");
  }
  if (!parsed.contains("choices") || !parsed["choices"].is_array() || parsed["choices"].empty()) {
    fail(Errc::provider_failure, "provider response has no choices");
  }
  const auto& message = parsed["choices"][0]["message"];
  if (!message.is_object() || !message.contains("content") || !message["content"].is_string()) {
    fail(Errc::provider_failure, "provider response has no message content");
  }
  return message["content"].get<std::string>();
}

const std::string& extraction_instruction() {
  static const std::string instruction =
      "Extract an attack graph from the security logs that follow. Respond with "
      "a single JSON object and nothing else, shaped as {\"nodes\": [{\"id\", "
      "\"label\"?}], \"edges\": [{\"src\", \"dst\"}], \"entry\", \"target\"}. "
      "Node ids are short tokens (letters, digits, underscore, hyphen); edges "
      "are directed attacker transitions; entry is the initial foothold and "
      "target the objective.";
  return instruction;
}

namespace {

// Drop edges whose endpoints are not declared nodes; record each one.
GraphDoc repair_document(GraphDoc doc, std::vector<Diagnostic>& diagnostics) {
  std::set<std::string> ids;
  for (const auto& n : doc.nodes) ids.insert(n.id);
  std::vector<GraphDoc::DocEdge> kept;
  kept.reserve(doc.edges.size());
  for (auto& e : doc.edges) {
    if (ids.contains(e.src) && ids.contains(e.dst)) {
      kept.push_back(std::move(e));
    } else {
      diagnostics.push_back({"DANGLING_EDGE", e.src + "->" + e.dst,
                             "dropped edge with undeclared endpoint"});
    }
  }
  doc.edges = std::move(kept);
  return doc;
}

}  // namespace

ExtractionResult extract_graph(const std::string& logs, CompletionProvider& provider,
                               const ExtractOptions& options) {
  if (logs.empty()) fail(Errc::config, "logs must be non-empty");

  std::vector<Diagnostic> diagnostics;
  std::string instruction = extraction_instruction();
  std::string last_output;
  std::string last_error;
  bool provider_failed_last = false;

  int attempts = options.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    ProviderRequest request{instruction, logs, options.byte_budget};
    std::string raw;
    try {
      raw = provider.complete(request);
      provider_failed_last = false;
    } catch (const Error& e) {
      if (e.code() != Errc::provider_failure) throw;
      provider_failed_last = true;
      last_error = e.what();
      diagnostics.push_back({"PROVIDER_RETRY", "", e.what()});
      continue;
    }

    last_output = raw;
    try {
      std::vector<Diagnostic> repairs;
      GraphDoc doc = repair_document(parse_graph_document(raw), repairs);
      AttackGraph graph = assemble_graph(doc);
      // Unreachable-target output is rejected; lesser reachability warnings
      // are the caller's to surface via validate().
      for (const Diagnostic& d : validate(graph)) {
        if (d.code == kDiagTargetUnreachable) throw Error(Errc::target_unreachable, d.message);
      }
      ExtractionResult result{std::move(graph), std::move(diagnostics)};
      result.diagnostics.insert(result.diagnostics.end(), repairs.begin(), repairs.end());
      return result;
    } catch (const Error& e) {
      last_error = e.what();
      diagnostics.push_back({"OUTPUT_REJECTED", "", e.what()});
      instruction = extraction_instruction() +
                    " The previous output was rejected (" + e.what() +
                    "). Return a corrected JSON document only.";
    }
  }

  if (provider_failed_last) {
    fail(Errc::provider_failure, "provider failed after " + std::to_string(attempts) +
                                     " attempts: " + last_error);
  }
  throw UnparseableOutput("provider output was rejected after " + std::to_string(attempts) +
                              " attempts: " + last_error,
                          last_output);
}

AttackGraph extract_graph_fallback(const std::string& logs) {
  GraphDoc doc;
  bool have_entry = false, have_target = false;

  std::istringstream in(logs);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string keyword;
    fields >> keyword;
    if (keyword == "NODE") {
      std::string id;
      fields >> id;
      if (id.empty()) fail(Errc::syntax_error, "NODE line without an id: \"" + line + "\"");
      std::string label;
      std::getline(fields, label);
      std::size_t start = label.find_first_not_of(" \t");
      label = start == std::string::npos ? "" : label.substr(start);
      doc.nodes.push_back({id, label});
    } else if (keyword == "EDGE") {
      std::string src, dst;
      fields >> src >> dst;
      if (src.empty() || dst.empty()) fail(Errc::syntax_error, "EDGE line needs src and dst: \"" + line + "\"");
      doc.edges.push_back({src, dst});
    } else if (keyword == "ENTRY") {
      std::string id;
      fields >> id;
      if (id.empty()) fail(Errc::syntax_error, "ENTRY line without an id");
      if (have_entry) fail(Errc::syntax_error, "duplicate ENTRY line");
      doc.entry = id;
      have_entry = true;
    } else if (keyword == "TARGET") {
      std::string id;
      fields >> id;
      if (id.empty()) fail(Errc::syntax_error, "TARGET line without an id");
      if (have_target) fail(Errc::syntax_error, "duplicate TARGET line");
      doc.target = id;
      have_target = true;
    }
    // Anything else is noise and is ignored.
  }

  if (!have_entry) fail(Errc::missing_field, "structured log has no ENTRY line");
  if (!have_target) fail(Errc::missing_field, "structured log has no TARGET line");
  return assemble_graph(doc);
}

std::string normalize_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool pending_space = false;
  for (unsigned char c : label) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

CorrespondenceScore node_correspondence(const AttackGraph& candidate,
                                        const AttackGraph& reference) {
  // Normalized label -> node ids, in id order for deterministic pairing.
  std::map<std::string, std::vector<NodeId>> cand_by_label, ref_by_label;
  for (const Node& n : candidate.nodes()) cand_by_label[normalize_label(n.label)].push_back(n.id);
  for (const Node& n : reference.nodes()) ref_by_label[normalize_label(n.label)].push_back(n.id);

  CorrespondenceScore score;
  for (const auto& [label, cand_ids] : cand_by_label) {
    auto it = ref_by_label.find(label);
    if (it == ref_by_label.end()) continue;
    std::size_t n = std::min(cand_ids.size(), it->second.size());
    for (std::size_t i = 0; i < n; ++i) score.matched.emplace_back(cand_ids[i], it->second[i]);
  }

  std::size_t cand_total = candidate.nodes().size();
  std::size_t ref_total = reference.nodes().size();
  if (!score.matched.empty() && cand_total > 0 && ref_total > 0) {
    score.precision = static_cast<double>(score.matched.size()) / static_cast<double>(cand_total);
    score.recall = static_cast<double>(score.matched.size()) / static_cast<double>(ref_total);
    score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

}  // namespace cutrope

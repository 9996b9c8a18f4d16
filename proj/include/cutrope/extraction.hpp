#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cutrope/error.hpp"
#include "cutrope/graph.hpp"

namespace cutrope {

struct ProviderRequest {
  std::string instruction;
  std::string logs;
  std::size_t byte_budget = 1 << 16;  // largest accepted response
};

// Completion backend for LLM-based extraction. Implementations return the
// raw graph-document text or throw Error(Errc::provider_failure). Raw output
// is never trusted: extract_graph parses and validates everything.
class CompletionProvider {
public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const ProviderRequest& request) = 0;
};

// Deterministic provider that serves stored responses from a fixture
// directory, keyed by request hash: <dir>/<sha256(instruction \x1e logs)>.txt
class ReplayProvider final : public CompletionProvider {
public:
  explicit ReplayProvider(std::string fixture_dir);
  std::string complete(const ProviderRequest& request) override;

  static std::string request_key(const ProviderRequest& request);
  static std::string fixture_filename(const ProviderRequest& request);

private:
  std::string dir_;
};

struct RemoteConfig {
  std::string base_url;  // e.g. http://localhost:8080/v1
  std::string token;
  std::string model;

  // Reads CUTROPE_PROVIDER_URL, CUTROPE_PROVIDER_TOKEN,
  // CUTROPE_PROVIDER_MODEL; throws Errc::config when URL or token is unset.
  static RemoteConfig from_env();
};

// Minimal chat-completion HTTP client: POST <base>/chat/completions with a
// bearer token; the completion text is choices[0].message.content. No
// vendor-specific features.
class RemoteProvider final : public CompletionProvider {
public:
  explicit RemoteProvider(RemoteConfig config);
  std::string complete(const ProviderRequest& request) override;

private:
  RemoteConfig config_;
};

struct ExtractionResult {
  AttackGraph graph;
  std::vector<Diagnostic> diagnostics;  // retries, repairs, reachability warnings
};

struct ExtractOptions {
  int max_retries = 2;  // attempts = 1 + max_retries
  std::size_t byte_budget = 1 << 16;
};

// LLM-backed extraction with bounded repair: provider output goes through
// parse + validate; dangling edges are dropped (recorded as DANGLING_EDGE),
// and rejected output triggers a retry with the error appended to the
// instruction. Throws Errc::provider_failure when the provider keeps
// failing, or UnparseableOutput when its output never becomes a valid graph.
ExtractionResult extract_graph(const std::string& logs, CompletionProvider& provider,
                               const ExtractOptions& options = {});

class UnparseableOutput : public Error {
public:
  UnparseableOutput(const std::string& message, std::string offending_output)
      : Error(Errc::unparseable_output, message),
        offending_output_(std::move(offending_output)) {}

  // The rejected provider output, preserved for audit.
  const std::string& offending_output() const { return offending_output_; }

private:
  std::string offending_output_;
};

// Deterministic offline substitute for the LLM phase. Line grammar:
//   NODE <id> <label...>
//   EDGE <src> <dst>
//   ENTRY <id>
//   TARGET <id>
// Any other line is ignored. Semantics match parse_graph (duplicate ids,
// unknown endpoints, missing ENTRY/TARGET are errors).
AttackGraph extract_graph_fallback(const std::string& logs);

struct CorrespondenceScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<std::pair<NodeId, NodeId>> matched;  // (candidate, reference)
};

// Greedy exact matching of normalized labels (lowercased, trimmed, inner
// whitespace collapsed). precision = |matched| / |candidate nodes|,
// recall = |matched| / |reference nodes|, f1 their harmonic mean.
CorrespondenceScore node_correspondence(const AttackGraph& candidate,
                                        const AttackGraph& reference);

std::string normalize_label(std::string_view label);

// Base instruction sent to completion providers.
const std::string& extraction_instruction();

}  // namespace cutrope

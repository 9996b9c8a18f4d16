#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cutrope/graph.hpp"
#include "cutrope/nash.hpp"

namespace cutrope {

enum class DigestFormat { plain, markdown, json };

DigestFormat parse_digest_format(std::string_view name);  // throws Errc::config
const char* digest_format_name(DigestFormat f);

struct StrategicDigest {
  std::string text;  // ends with exactly one trailing newline
  DigestFormat format = DigestFormat::plain;
  std::string source_hash;  // content hash of (graph, params fingerprint, equilibrium)
};

// Digest wording, loaded from a sectioned template file (see
// templates/README.md). Rendering is placeholder substitution only.
struct DigestTemplates {
  std::string layout;
  std::string defense_line;
  std::string attack_line;
};

DigestTemplates load_digest_templates(const std::string& file_text);
// Embedded copies of templates/digest_plain.tmpl and digest_markdown.tmpl.
const DigestTemplates& builtin_templates(DigestFormat f);

// Deterministic rendering of a verified equilibrium: defense allocation
// sorted by probability descending then node id, attack paths likewise,
// then the value line; zero-probability actions are omitted. Every label in
// the equilibrium must resolve in g (Errc::unresolved_label otherwise).
// Attacker labels may carry the "<index>:" column prefix; it is stripped.
// params_fingerprint is mixed into source_hash, nothing else.
StrategicDigest render_digest(const Equilibrium& eq, const AttackGraph& g,
                              DigestFormat format,
                              const std::string& params_fingerprint = {});
StrategicDigest render_digest(const Equilibrium& eq, const AttackGraph& g,
                              DigestFormat format, const DigestTemplates& templates,
                              const std::string& params_fingerprint = {});

inline constexpr const char* kDigestBegin = "BEGIN-STRATEGIC-DIGEST";
inline constexpr const char* kDigestEnd = "END-STRATEGIC-DIGEST";

// Returns the prompt with exactly one digest block between the sentinel
// lines: appended when absent, replaced in place when present. All content
// outside the block is preserved byte for byte. Throws
// Errc::malformed_block when the input's sentinels are unbalanced.
std::string inject_digest(std::string_view prompt, const StrategicDigest& d);

// Content between the sentinel lines, when exactly one well-formed block
// exists. Round-trips render/inject: extracted content equals digest text.
std::optional<std::string> extract_digest_block(std::string_view prompt);

}  // namespace cutrope

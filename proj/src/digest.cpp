#include "cutrope/digest.hpp"

#include <algorithm>
#include <vector>

#include "builtin_templates.hpp"
#include "cutrope/jsonio.hpp"
#include "cutrope/sha256.hpp"

namespace cutrope {

namespace {

constexpr double kZeroWeight = 1e-12;

std::string substitute(std::string text, std::string_view key, std::string_view value) {
  std::string marker = "{{" + std::string(key) + "}}";
  std::size_t pos = 0;
  while ((pos = text.find(marker, pos)) != std::string::npos) {
    text.replace(pos, marker.size(), value);
    pos += value.size();
  }
  return text;
}

struct RenderEntry {
  std::string display;  // node id or path node sequence
  std::string sort_key;
  double weight;
};

std::vector<RenderEntry> defense_entries(const Equilibrium& eq, const AttackGraph& g) {
  std::vector<RenderEntry> entries;
  for (const auto& [label, w] : eq.defender.weights) {
    if (w < kZeroWeight) continue;
    NodeId id(label);
    if (!g.has_node(id)) {
      fail(Errc::unresolved_label, "defender action \"" + label + "\" is not a node of the graph");
    }
    entries.push_back({label, label, w});
  }
  return entries;
}

// Accepts "1->2->9" or the column form "3:1->2->9"; every node must exist.
std::string resolve_path_label(const std::string& label, const AttackGraph& g) {
  std::string seq = label;
  auto colon = seq.find(':');
  if (colon != std::string::npos &&
      seq.find_first_not_of("0123456789") == colon) {
    seq = seq.substr(colon + 1);
  }
  std::size_t start = 0;
  while (start <= seq.size()) {
    std::size_t arrow = seq.find("->", start);
    std::string token = seq.substr(start, arrow == std::string::npos ? std::string::npos : arrow - start);
    if (token.empty() || !g.has_node(NodeId(token))) {
      fail(Errc::unresolved_label, "attacker action \"" + label + "\" does not resolve in the graph");
    }
    if (arrow == std::string::npos) break;
    start = arrow + 2;
  }
  return seq;
}

std::vector<RenderEntry> attack_entries(const Equilibrium& eq, const AttackGraph& g) {
  std::vector<RenderEntry> entries;
  for (const auto& [label, w] : eq.attacker.weights) {
    if (w < kZeroWeight) continue;
    std::string seq = resolve_path_label(label, g);
    entries.push_back({seq, seq, w});
  }
  return entries;
}

void sort_entries(std::vector<RenderEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RenderEntry& a, const RenderEntry& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.sort_key < b.sort_key;
  });
}

std::string render_lines(const std::vector<RenderEntry>& entries,
                         const std::string& line_template, const char* name_key) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += "\n";
    std::string line = substitute(line_template, name_key, entries[i].display);
    line = substitute(std::move(line), "prob", fmt_fixed(entries[i].weight, 3));
    line = substitute(std::move(line), "percent", fmt_fixed(entries[i].weight * 100.0, 3));
    out += line;
  }
  return out;
}

std::string equilibrium_fingerprint(const Equilibrium& eq) {
  return serialize_equilibrium(eq);
}

std::string digest_source_hash(const AttackGraph& g, const std::string& params_fingerprint,
                               const Equilibrium& eq) {
  return sha256_hex(serialize_graph(g) + "\x1e" + params_fingerprint + "\x1e" +
                    equilibrium_fingerprint(eq));
}

std::string render_json_digest(const Equilibrium& eq, const AttackGraph& g,
                               const std::vector<RenderEntry>& defense,
                               const std::vector<RenderEntry>& attack,
                               const std::string& human_summary) {
  (void)g;
  std::string out = "{\n  \"defender\": {";
  for (std::size_t i = 0; i < defense.size(); ++i) {
    out += (i == 0 ? "\n" : ",\n");
    out += "    \"" + json_escape(defense[i].display) + "\": " + fmt_fixed(defense[i].weight, 6);
  }
  out += "\n  },\n  \"attacker\": {";
  for (std::size_t i = 0; i < attack.size(); ++i) {
    out += (i == 0 ? "\n" : ",\n");
    out += "    \"" + json_escape(attack[i].display) + "\": " + fmt_fixed(attack[i].weight, 6);
  }
  out += "\n  },\n  \"value\": " + fmt_fixed(eq.value, 6) + ",\n";
  out += "  \"gaps\": {\n";
  out += "    \"defender\": " + fmt_shortest(eq.gaps.defender) + ",\n";
  out += "    \"attacker\": " + fmt_shortest(eq.gaps.attacker) + "\n  },\n";
  out += "  \"human_summary\": \"" + json_escape(human_summary) + "\"\n}\n";
  return out;
}

}  // namespace

DigestFormat parse_digest_format(std::string_view name) {
  if (name == "plain") return DigestFormat::plain;
  if (name == "markdown") return DigestFormat::markdown;
  if (name == "json") return DigestFormat::json;
  fail(Errc::config, "unknown digest format \"" + std::string(name) + "\" (want plain, markdown, json)");
}

const char* digest_format_name(DigestFormat f) {
  switch (f) {
    case DigestFormat::plain: return "plain";
    case DigestFormat::markdown: return "markdown";
    case DigestFormat::json: return "json";
  }
  return "plain";
}

DigestTemplates load_digest_templates(const std::string& file_text) {
  DigestTemplates t;
  std::string* section = nullptr;
  std::size_t pos = 0;
  bool first_line_of_section = true;
  while (pos <= file_text.size()) {
    std::size_t nl = file_text.find('\n', pos);
    std::string line = file_text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (line == "[layout]") {
      section = &t.layout;
      first_line_of_section = true;
    } else if (line == "[defense_line]") {
      section = &t.defense_line;
      first_line_of_section = true;
    } else if (line == "[attack_line]") {
      section = &t.attack_line;
      first_line_of_section = true;
    } else if (section != nullptr) {
      if (!first_line_of_section) *section += "\n";
      *section += line;
      first_line_of_section = false;
    } else if (!line.empty()) {
      fail(Errc::syntax_error, "template content before the first section header");
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  // A trailing newline in the file is file formatting, not template content.
  if (t.layout.ends_with('\n')) t.layout.pop_back();
  if (t.defense_line.ends_with('\n')) t.defense_line.pop_back();
  if (t.attack_line.ends_with('\n')) t.attack_line.pop_back();
  if (t.layout.empty()) fail(Errc::syntax_error, "template file has no [layout] section");
  return t;
}

const DigestTemplates& builtin_templates(DigestFormat f) {
  static const DigestTemplates plain = load_digest_templates(detail::kPlainTemplate);
  static const DigestTemplates markdown = load_digest_templates(detail::kMarkdownTemplate);
  return f == DigestFormat::markdown ? markdown : plain;
}

StrategicDigest render_digest(const Equilibrium& eq, const AttackGraph& g,
                              DigestFormat format, const DigestTemplates& templates,
                              const std::string& params_fingerprint) {
  std::vector<RenderEntry> defense = defense_entries(eq, g);
  std::vector<RenderEntry> attack = attack_entries(eq, g);
  sort_entries(defense);
  sort_entries(attack);

  std::string text;
  if (format == DigestFormat::json) {
    const DigestTemplates& plain = builtin_templates(DigestFormat::plain);
    std::string summary = substitute(plain.layout, "defense_lines",
                                     render_lines(defense, plain.defense_line, "node"));
    summary = substitute(std::move(summary), "attack_lines",
                         render_lines(attack, plain.attack_line, "path"));
    summary = substitute(std::move(summary), "value_percent", fmt_fixed(eq.value * 100.0, 3));
    text = render_json_digest(eq, g, defense, attack, summary);
  } else {
    text = substitute(templates.layout, "defense_lines",
                      render_lines(defense, templates.defense_line, "node"));
    text = substitute(std::move(text), "attack_lines",
                      render_lines(attack, templates.attack_line, "path"));
    text = substitute(std::move(text), "value_percent", fmt_fixed(eq.value * 100.0, 3));
  }
  while (text.ends_with('\n')) text.pop_back();
  text += "\n";

  StrategicDigest d;
  d.text = std::move(text);
  d.format = format;
  d.source_hash = digest_source_hash(g, params_fingerprint, eq);
  return d;
}

StrategicDigest render_digest(const Equilibrium& eq, const AttackGraph& g,
                              DigestFormat format, const std::string& params_fingerprint) {
  return render_digest(eq, g, format, builtin_templates(format), params_fingerprint);
}

namespace {

// Byte offsets where an exact sentinel line starts.
std::vector<std::size_t> sentinel_lines(std::string_view text, std::string_view sentinel) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while ((pos = text.find(sentinel, pos)) != std::string_view::npos) {
    bool at_line_start = pos == 0 || text[pos - 1] == '\n';
    std::size_t end = pos + sentinel.size();
    bool at_line_end = end == text.size() || text[end] == '\n';
    if (at_line_start && at_line_end) out.push_back(pos);
    pos = end;
  }
  return out;
}

}  // namespace

std::string inject_digest(std::string_view prompt, const StrategicDigest& d) {
  std::string text = d.text;
  if (!text.ends_with('\n')) text += '\n';

  std::vector<std::size_t> begins = sentinel_lines(prompt, kDigestBegin);
  std::vector<std::size_t> ends = sentinel_lines(prompt, kDigestEnd);

  if (begins.empty() && ends.empty()) {
    std::string out(prompt);
    if (!out.empty() && !out.ends_with('\n')) out += '\n';
    out += kDigestBegin;
    out += '\n';
    out += text;
    out += kDigestEnd;
    out += '\n';
    return out;
  }
  if (begins.size() != 1 || ends.size() != 1 || ends[0] <= begins[0]) {
    fail(Errc::malformed_block, "prompt has unbalanced digest sentinels");
  }

  std::size_t content_start = begins[0] + std::string_view(kDigestBegin).size() + 1;
  if (content_start > ends[0]) fail(Errc::malformed_block, "digest sentinels are not on separate lines");
  std::string out(prompt.substr(0, content_start));
  out += text;
  out += prompt.substr(ends[0]);
  return out;
}

std::optional<std::string> extract_digest_block(std::string_view prompt) {
  std::vector<std::size_t> begins = sentinel_lines(prompt, kDigestBegin);
  std::vector<std::size_t> ends = sentinel_lines(prompt, kDigestEnd);
  if (begins.size() != 1 || ends.size() != 1 || ends[0] <= begins[0]) return std::nullopt;
  std::size_t content_start = begins[0] + std::string_view(kDigestBegin).size() + 1;
  if (content_start > ends[0]) return std::nullopt;
  return std::string(prompt.substr(content_start, ends[0] - content_start));
}

}  // namespace cutrope

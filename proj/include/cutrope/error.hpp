#pragma once

#include <stdexcept>
#include <string>

namespace cutrope {

// Stable error codes shared by the library and the CLI exit-code mapping.
enum class Errc {
  syntax_error,
  duplicate_node,
  unknown_node,
  missing_field,
  unknown_field,
  entry_equals_target,
  self_loop,
  duplicate_edge,
  invalid_path,
  target_unreachable,
  empty_strategy_set,
  entry_not_inspectable,
  duplicate_action,
  empty_matrix,
  nonfinite_entry,
  label_mismatch,
  unresolved_label,
  malformed_block,
  action_resolution,
  provider_failure,
  unparseable_output,
  config,
  io,
};

// SCREAMING_SNAKE name, e.g. "TARGET_UNREACHABLE". Used in messages and on
// the CLI's stderr.
const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

// Non-fatal finding (validation diagnostics, extraction repairs/retries).
struct Diagnostic {
  std::string code;     // e.g. "UNREACHABLE_NODE", "DANGLING_EDGE"
  std::string subject;  // offending node/edge id, may be empty
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

}  // namespace cutrope

#include "cutrope/error.hpp"

namespace cutrope {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::syntax_error: return "SYNTAX_ERROR";
    case Errc::duplicate_node: return "DUPLICATE_NODE";
    case Errc::unknown_node: return "UNKNOWN_NODE";
    case Errc::missing_field: return "MISSING_FIELD";
    case Errc::unknown_field: return "UNKNOWN_FIELD";
    case Errc::entry_equals_target: return "ENTRY_EQUALS_TARGET";
    case Errc::self_loop: return "SELF_LOOP";
    case Errc::duplicate_edge: return "DUPLICATE_EDGE";
    case Errc::invalid_path: return "INVALID_PATH";
    case Errc::target_unreachable: return "TARGET_UNREACHABLE";
    case Errc::empty_strategy_set: return "EMPTY_STRATEGY_SET";
    case Errc::entry_not_inspectable: return "ENTRY_NOT_INSPECTABLE";
    case Errc::duplicate_action: return "DUPLICATE_ACTION";
    case Errc::empty_matrix: return "EMPTY_MATRIX";
    case Errc::nonfinite_entry: return "NONFINITE_ENTRY";
    case Errc::label_mismatch: return "LABEL_MISMATCH";
    case Errc::unresolved_label: return "UNRESOLVED_LABEL";
    case Errc::malformed_block: return "MALFORMED_BLOCK";
    case Errc::action_resolution: return "ACTION_RESOLUTION";
    case Errc::provider_failure: return "PROVIDER_FAILURE";
    case Errc::unparseable_output: return "UNPARSEABLE_OUTPUT";
    case Errc::config: return "CONFIG";
    case Errc::io: return "IO";
  }
  return "UNKNOWN";
}

}  // namespace cutrope

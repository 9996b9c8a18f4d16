#pragma once

#include <string>
#include <string_view>

namespace cutrope {

// Lowercase hex SHA-256 of the input bytes. Used for content hashes in
// manifests, digests, and replay-fixture keys.
std::string sha256_hex(std::string_view data);

}  // namespace cutrope

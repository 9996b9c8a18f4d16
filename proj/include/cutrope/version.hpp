#pragma once

namespace cutrope {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cutrope

#pragma once

#include <string>
#include <string_view>

namespace cutrope {

// Shortest decimal form that round-trips to the same double. Locale
// independent; used for all report numbers so output bytes are stable.
std::string fmt_shortest(double v);

// Fixed-point with the given number of decimals, locale independent.
std::string fmt_fixed(double v, int decimals);

std::string json_escape(std::string_view s);

}  // namespace cutrope

#include "cutrope/jsonio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "cutrope/error.hpp"

namespace cutrope {

std::string fmt_shortest(double v) {
  if (!std::isfinite(v)) fail(Errc::nonfinite_entry, "cannot serialize non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  // Keep the output valid JSON and recognizably floating point.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_fixed(double v, int decimals) {
  if (!std::isfinite(v)) fail(Errc::nonfinite_entry, "cannot serialize non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

}  // namespace cutrope

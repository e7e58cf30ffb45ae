#pragma once

#include <charconv>
#include <string>

namespace proxyens::detail {

// Shortest decimal form that parses back to the same double.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace proxyens::detail

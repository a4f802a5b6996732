#pragma once

#include <charconv>
#include <string>

namespace aoisim {

// Shortest round-trip decimal form; identical output on every platform, which
// keeps CSV files byte-stable for fixed seeds.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace aoisim

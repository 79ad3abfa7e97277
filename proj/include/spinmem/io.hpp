#pragma once

#include <charconv>
#include <iostream>
#include <string>

namespace spinmem {

// Locale-independent formatting with 17 significant digits, enough for
// doubles to round-trip exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

}  // namespace spinmem

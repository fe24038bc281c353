#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include "actmuscle/errors.hpp"

namespace actmuscle {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Strict decimal parse; the whole string must be consumed.
inline double parse_double(const std::string& s, const std::string& what = "number") {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (b < e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw InputError("cannot parse " + what + " '" + s + "'");
  return v;
}

}  // namespace actmuscle

#ifndef PROTOSEG_FORMAT_HPP
#define PROTOSEG_FORMAT_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace protoseg {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

/// Fixed-point form with `digits` decimals, for report tables.
inline std::string format_fixed(double value, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

}  // namespace protoseg

#endif  // PROTOSEG_FORMAT_HPP

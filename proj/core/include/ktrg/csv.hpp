#pragma once

#include <charconv>
#include <concepts>
#include <ostream>
#include <string>

namespace ktrg::csv {

// Shortest round-trip representation, independent of the locale.
inline std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline std::string num(bool v) { return v ? "1" : "0"; }

template <std::integral T>
  requires(!std::same_as<T, bool>)
std::string num(T v) {
  return std::to_string(v);
}

template <class T>
decltype(auto) field(const T& v) {
  if constexpr (std::is_arithmetic_v<T>)
    return num(v);
  else
    return (v);
}

template <class... T>
void row(std::ostream& out, const T&... fields) {
  bool first = true;
  ((out << (first ? "" : ",") << field(fields), first = false), ...);
  out << '\n';
}

}  // namespace ktrg::csv

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slfv {

// Round-trippable decimal: 17 significant digits.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s) {
  const std::string str(trim(s));
  if (str == "inf" || str == "+inf") return HUGE_VAL;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + str + "'");
  }
  if (used != str.size()) throw std::invalid_argument("not a number: '" + str + "'");
  return v;
}

inline long long parse_int(std::string_view s) {
  const auto t = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw std::invalid_argument("not an integer: '" + std::string(t) + "'");
  return v;
}

inline std::uint64_t parse_u64(std::string_view s) {
  auto t = trim(s);
  int base = 10;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    t.remove_prefix(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v, base);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument("not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

inline std::vector<double> parse_double_list(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
  return out;
}

// Flat key=value entries, ordered for stable serialization.
using Entries = std::map<std::string, std::string>;

}  // namespace slfv

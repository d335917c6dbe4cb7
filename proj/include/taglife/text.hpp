#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace taglife {

inline std::string to_lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

inline bool icontains(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return true;
  const std::string h = to_lower(haystack);
  return h.find(to_lower(needle)) != std::string::npos;
}

// Fixed-width numeric formatting so repeated runs emit byte-identical files.
inline std::string fmt_double(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::string fmt_compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);
std::string join_csv(const std::vector<std::string>& fields);

}  // namespace taglife

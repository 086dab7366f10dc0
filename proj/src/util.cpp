#include "ragbench/util.hpp"

#include <algorithm>
#include <cctype>

namespace ragbench {

std::string Digest::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  uint64_t v = state_;
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::string fnv1a_hex(std::string_view data) {
  Digest d;
  d.update(data);
  return d.hex();
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      in_ws = true;
    } else {
      if (in_ws && !out.empty()) out.push_back(' ');
      in_ws = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::string collapse_double_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(c);
  }
  return out;
}

std::string normalize_query(std::string_view q) {
  return to_lower_ascii(collapse_whitespace(trim(q)));
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

size_t levenshtein(std::string_view a, std::string_view b, size_t cap) {
  a = a.substr(0, cap);
  b = b.substr(0, cap);
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t prev = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t cur = row[j];
      size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, prev + cost});
      prev = cur;
    }
  }
  return row[b.size()];
}

std::string replace_all(std::string_view haystack, std::string_view needle,
                        std::string_view replacement, size_t* count) {
  if (needle.empty()) return std::string(haystack);
  std::string out;
  out.reserve(haystack.size());
  size_t pos = 0;
  while (true) {
    size_t hit = haystack.find(needle, pos);
    if (hit == std::string_view::npos) break;
    out.append(haystack.substr(pos, hit - pos));
    out.append(replacement);
    if (count) ++*count;
    pos = hit + needle.size();
  }
  out.append(haystack.substr(pos));
  return out;
}

std::string strip_tokens(std::string_view text, std::vector<std::string> tokens,
                         size_t* removed) {
  std::stable_sort(tokens.begin(), tokens.end(),
                   [](const std::string& a, const std::string& b) {
                     return a.size() > b.size();
                   });
  std::string out(text);
  size_t total = 0;
  for (const auto& token : tokens) {
    if (token.empty()) continue;
    size_t count = 0;
    out = replace_all(out, token, "", &count);
    total += count;
  }
  if (removed) *removed = total;
  return collapse_double_spaces(out);
}

}  // namespace ragbench

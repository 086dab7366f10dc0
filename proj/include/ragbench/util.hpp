#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ragbench {

// 64-bit FNV-1a. Used for all content digests (corpus fingerprint,
// retriever config digest, alignment fingerprint). Stable across
// platforms and runs.
class Digest {
 public:
  Digest& update(std::string_view data) {
    for (unsigned char c : data) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  Digest& update_u64(uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return update(std::string_view(buf, 8));
  }

  // Field separator so {"a","bc"} and {"ab","c"} hash differently.
  Digest& sep() {
    state_ ^= 0x1f;
    state_ *= 0x100000001b3ULL;
    return *this;
  }

  uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string fnv1a_hex(std::string_view data);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

/// Collapse runs of whitespace to a single space (does not trim ends).
std::string collapse_whitespace(std::string_view s);

/// Collapse runs of two or more spaces to one space. Newlines untouched.
std::string collapse_double_spaces(std::string_view s);

/// Cache-key normalization: trim + collapse internal whitespace + lowercase.
std::string normalize_query(std::string_view q);

std::vector<std::string> split_whitespace(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

/// Edit distance over at most the first `cap` characters of each string.
size_t levenshtein(std::string_view a, std::string_view b, size_t cap = 160);

/// Replace every occurrence of `needle` in `haystack` with `replacement`.
std::string replace_all(std::string_view haystack, std::string_view needle,
                        std::string_view replacement, size_t* count = nullptr);

/// Remove every occurrence of each token (longest token first, so
/// "[No Retrieval]" never leaves a stray "[No "), then collapse the double
/// spaces the removals leave behind. `removed`, if given, receives the number
/// of occurrences cut. Applying it a second time removes nothing.
std::string strip_tokens(std::string_view text,
                         std::vector<std::string> tokens,
                         size_t* removed = nullptr);

}  // namespace ragbench

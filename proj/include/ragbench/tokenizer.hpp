#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ragbench {

/// Identifier stamped into index headers so an index file records which
/// tokenization produced it.
inline constexpr const char* kTokenizerId = "uni-lite-1";

/// Lowercased split on non-alphanumeric boundaries. UTF-8 input is decoded
/// per codepoint: ASCII alphanumerics and non-ASCII codepoints are word
/// characters, except common Unicode punctuation blocks which act as
/// separators. Deterministic; shared by indexing and search.
std::vector<std::string> tokenize(std::string_view text);

/// Token count of `text` under the same rules (document length for BM25).
size_t token_count(std::string_view text);

}  // namespace ragbench

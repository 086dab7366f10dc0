#pragma once

#include <string>
#include <vector>

namespace ragbench {

/// Splits text into sentences. A boundary falls right after a '.', '?' or '!'
/// that is followed by whitespace or end-of-text, except when the '.'
/// terminates a known abbreviation ("Dr.", "e.g.", ...).
/// Whitespace after a boundary opens the next segment, so
/// concatenating the returned segments reproduces the input byte-for-byte:
/// "A. B? C" -> {"A.", " B?", " C"}.
std::vector<std::string> sentence_segment(const std::string& text);

/// The abbreviation tokens exempt from splitting.
const std::vector<std::string>& sentence_abbreviations();

}  // namespace ragbench

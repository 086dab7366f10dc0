#include "ragbench/sentence.hpp"

#include <cctype>
#include <set>

namespace ragbench {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

const std::set<std::string>& abbreviation_set() {
  static const std::set<std::string> set(sentence_abbreviations().begin(),
                                         sentence_abbreviations().end());
  return set;
}

// The whitespace-delimited token ending at the '.' at position `dot`,
// stripped of leading bracket/quote punctuation ("(Dr." -> "Dr.").
std::string token_ending_at(const std::string& text, size_t dot) {
  size_t start = dot;
  while (start > 0 && !is_space(text[start - 1])) --start;
  while (start < dot && (text[start] == '(' || text[start] == '[' ||
                         text[start] == '"' || text[start] == '\'')) {
    ++start;
  }
  return text.substr(start, dot - start + 1);
}

bool is_abbreviation(const std::string& text, size_t dot) {
  return abbreviation_set().count(token_ending_at(text, dot)) > 0;
}

}  // namespace

const std::vector<std::string>& sentence_abbreviations() {
  static const std::vector<std::string> abbrevs = {
      "Mr.", "Mrs.", "Ms.", "Dr.",  "Prof.", "Sr.",  "Jr.",  "St.",
      "Mt.", "No.",  "Fig.", "vs.", "etc.",  "e.g.", "i.e.", "cf.",
      "al.", "Inc.", "Ltd.", "Co.", "U.S.",  "U.K.", "approx."};
  return abbrevs;
}

std::vector<std::string> sentence_segment(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    bool terminator = (c == '.' || c == '?' || c == '!');
    bool at_break = terminator &&
                    (i + 1 == text.size() || is_space(text[i + 1])) &&
                    !(c == '.' && is_abbreviation(text, i));
    if (at_break) {
      out.push_back(text.substr(start, i + 1 - start));
      start = i + 1;
      i = start;
    } else {
      ++i;
    }
  }
  if (start < text.size()) out.push_back(text.substr(start));
  return out;
}

}  // namespace ragbench

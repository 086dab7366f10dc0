#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ragbench {

/// One normalized benchmark record, whatever the source schema looked like.
struct BenchmarkItem {
  std::string id;
  std::string question;
  std::vector<std::string> golds;  // >= 1 acceptable answers
  /// Labeled options for multiple-choice items (label, text); labels unique.
  std::vector<std::pair<std::string, std::string>> choices;
  /// Alias sets for coverage metrics: one inner list per required short
  /// answer (any alias counts as covering it).
  std::vector<std::vector<std::string>> answer_sets;
  std::map<std::string, std::string> metadata;
};

/// Maps source-record field names onto BenchmarkItem fields.
struct KeyMap {
  std::string question_key = "question";
  std::string answers_key = "answers";
  std::string choices_key;      // optional
  std::string id_key;           // optional; record position when empty
  std::string answer_sets_key;  // optional
};

/// Reads a JSONL dataset, normalizing each record through the keymap.
/// Scalar answers are coerced to one-element lists. Errors carry
/// "path:line:" prefixes; missing mapped keys and duplicate ids are errors.
std::vector<BenchmarkItem> load_dataset(const std::filesystem::path& path,
                                        const KeyMap& keymap);

/// First min(n, |items|) items, order preserved.
std::vector<BenchmarkItem> sample_sequential(std::vector<BenchmarkItem> items,
                                             size_t n);

/// "A. text\nB. text" block for prompt embedding; empty for no choices.
std::string format_choices(const BenchmarkItem& item);

}  // namespace ragbench

#include "ragbench/dataset.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "ragbench/errors.hpp"

namespace ragbench {
namespace {

using nlohmann::json;

std::string where(const std::filesystem::path& path, size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

std::string coerce_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ConfigError("expected a string/number/boolean");
}

std::vector<std::string> coerce_answer_list(const json& v) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(coerce_scalar(e));
  } else {
    out.push_back(coerce_scalar(v));
  }
  return out;
}

std::string auto_label(size_t index) {
  // A..Z, then AA, AB, ... for absurdly long choice lists.
  std::string label;
  size_t n = index;
  do {
    label.insert(label.begin(), static_cast<char>('A' + n % 26));
    n = n / 26;
  } while (n-- > 0);
  return label;
}

std::vector<std::pair<std::string, std::string>> parse_choices(const json& v) {
  std::vector<std::pair<std::string, std::string>> out;
  if (v.is_array()) {
    for (size_t i = 0; i < v.size(); ++i) {
      const auto& e = v[i];
      if (e.is_string()) {
        out.emplace_back(auto_label(i), e.get<std::string>());
      } else if (e.is_object() && e.contains("label") && e.contains("text")) {
        out.emplace_back(coerce_scalar(e["label"]), coerce_scalar(e["text"]));
      } else {
        throw ConfigError(
            "choice entries must be strings or {label, text} objects");
      }
    }
  } else if (v.is_object() && v.contains("text") && v.contains("label")) {
    // ARC-style parallel arrays: {"text": [...], "label": [...]}.
    const auto& texts = v["text"];
    const auto& labels = v["label"];
    if (!texts.is_array() || !labels.is_array() ||
        texts.size() != labels.size()) {
      throw ConfigError("choices.text and choices.label must be equal-length "
                        "arrays");
    }
    for (size_t i = 0; i < texts.size(); ++i) {
      out.emplace_back(coerce_scalar(labels[i]), coerce_scalar(texts[i]));
    }
  } else {
    throw ConfigError("unsupported choices shape");
  }
  std::set<std::string> seen;
  for (const auto& [label, text] : out) {
    if (!seen.insert(label).second) {
      throw ConfigError("duplicate choice label '" + label + "'");
    }
  }
  return out;
}

std::vector<std::vector<std::string>> parse_answer_sets(const json& v) {
  if (!v.is_array()) {
    throw ConfigError("answer sets must be a list of alias lists");
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& e : v) {
    out.push_back(coerce_answer_list(e));
    if (out.back().empty()) {
      throw ConfigError("answer set with no aliases");
    }
  }
  return out;
}

}  // namespace

std::vector<BenchmarkItem> load_dataset(const std::filesystem::path& path,
                                        const KeyMap& keymap) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());

  std::vector<BenchmarkItem> items;
  std::set<std::string> seen_ids;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError(where(path, lineno) + "invalid JSON: " + e.what());
    }
    if (!record.is_object()) {
      throw ConfigError(where(path, lineno) + "record is not a JSON object");
    }
    try {
      BenchmarkItem item;
      if (!record.contains(keymap.question_key)) {
        throw ConfigError("missing question key '" + keymap.question_key + "'");
      }
      item.question = coerce_scalar(record[keymap.question_key]);
      if (!record.contains(keymap.answers_key)) {
        throw ConfigError("missing answers key '" + keymap.answers_key + "'");
      }
      item.golds = coerce_answer_list(record[keymap.answers_key]);
      if (item.golds.empty()) {
        throw ConfigError("record has no gold answers");
      }
      if (!keymap.id_key.empty()) {
        if (!record.contains(keymap.id_key)) {
          throw ConfigError("missing id key '" + keymap.id_key + "'");
        }
        item.id = coerce_scalar(record[keymap.id_key]);
      } else {
        item.id = std::to_string(items.size());
      }
      if (!keymap.choices_key.empty()) {
        if (!record.contains(keymap.choices_key)) {
          throw ConfigError("missing choices key '" + keymap.choices_key + "'");
        }
        item.choices = parse_choices(record[keymap.choices_key]);
      }
      if (!keymap.answer_sets_key.empty() &&
          record.contains(keymap.answer_sets_key)) {
        item.answer_sets = parse_answer_sets(record[keymap.answer_sets_key]);
      }
      for (const auto& [key, value] : record.items()) {
        if (key == keymap.question_key || key == keymap.answers_key ||
            key == keymap.choices_key || key == keymap.id_key ||
            key == keymap.answer_sets_key) {
          continue;
        }
        if (value.is_string() || value.is_number() || value.is_boolean()) {
          item.metadata[key] = coerce_scalar(value);
        }
      }
      if (!seen_ids.insert(item.id).second) {
        throw ConfigError("duplicate item id '" + item.id + "'");
      }
      items.push_back(std::move(item));
    } catch (const ConfigError& e) {
      std::string msg = e.what();
      if (msg.rfind(path.string(), 0) == 0) throw;
      throw ConfigError(where(path, lineno) + msg);
    }
  }
  return items;
}

std::vector<BenchmarkItem> sample_sequential(std::vector<BenchmarkItem> items,
                                             size_t n) {
  if (items.size() > n) items.resize(n);
  return items;
}

std::string format_choices(const BenchmarkItem& item) {
  std::string out;
  for (const auto& [label, text] : item.choices) {
    if (!out.empty()) out += "\n";
    out += label + ". " + text;
  }
  return out;
}

}  // namespace ragbench

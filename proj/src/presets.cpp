#include "ragbench/presets.hpp"

#include <yaml-cpp/yaml.h>

#include "ragbench/errors.hpp"

namespace ragbench {
namespace {

BenchmarkPreset qa_preset(const std::string& name, int max_length, int n_docs) {
  BenchmarkPreset p;
  p.name = name;
  p.metrics = {"accuracy", "f1"};
  p.max_length = max_length;
  p.n_docs = n_docs;
  return p;
}

std::map<std::string, BenchmarkPreset> make_builtins() {
  std::map<std::string, BenchmarkPreset> out;
  for (const char* name : {"popqa", "triviaqa", "hotpotqa", "2wikimultihopqa",
                           "strategyqa"}) {
    out[name] = qa_preset(name, 300, 10);
  }
  for (const char* name : {"arc", "mmlu"}) {
    BenchmarkPreset p = qa_preset(name, 50, 10);
    p.keymap.choices_key = "choices";
    out[name] = p;
  }
  out["pubhealth"] = qa_preset("pubhealth", 50, 10);
  out["factscore"] = qa_preset("factscore", 300, 5);

  BenchmarkPreset asqa;
  asqa.name = "asqa";
  asqa.metrics = {"str_em", "str_hit", "rouge_l"};
  asqa.max_length = 300;
  asqa.n_docs = 5;
  asqa.keymap.answer_sets_key = "answer_sets";
  out["asqa"] = asqa;
  return out;
}

}  // namespace

const std::map<std::string, BenchmarkPreset>& builtin_presets() {
  static const std::map<std::string, BenchmarkPreset> presets = make_builtins();
  return presets;
}

std::map<std::string, BenchmarkPreset> load_presets_file(
    const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot load presets from " + path.string() + ": " +
                      e.what());
  }
  if (!root.IsMap()) {
    throw ConfigError(path.string() + ": presets file must map name -> preset");
  }
  std::map<std::string, BenchmarkPreset> out;
  for (const auto& entry : root) {
    BenchmarkPreset p;
    p.name = entry.first.as<std::string>();
    const YAML::Node& node = entry.second;
    if (node["metrics"]) {
      for (const auto& m : node["metrics"]) {
        p.metrics.push_back(m.as<std::string>());
      }
    }
    if (node["max_length"]) p.max_length = node["max_length"].as<int>();
    if (node["n_docs"]) p.n_docs = node["n_docs"].as<int>();
    if (node["keymap"]) {
      const YAML::Node& km = node["keymap"];
      if (km["question_key"]) {
        p.keymap.question_key = km["question_key"].as<std::string>();
      }
      if (km["answers_key"]) {
        p.keymap.answers_key = km["answers_key"].as<std::string>();
      }
      if (km["choices_key"]) {
        p.keymap.choices_key = km["choices_key"].as<std::string>();
      }
      if (km["id_key"]) p.keymap.id_key = km["id_key"].as<std::string>();
      if (km["answer_sets_key"]) {
        p.keymap.answer_sets_key = km["answer_sets_key"].as<std::string>();
      }
    }
    if (p.metrics.empty()) p.metrics = {"accuracy", "f1"};
    if (p.max_length < 1) {
      throw ConfigError(path.string() + ": preset '" + p.name +
                        "': max_length must be >= 1");
    }
    if (p.n_docs < 1) {
      throw ConfigError(path.string() + ": preset '" + p.name +
                        "': n_docs must be >= 1");
    }
    out[p.name] = std::move(p);
  }
  return out;
}

BenchmarkPreset resolve_preset(
    const std::string& name,
    const std::map<std::string, BenchmarkPreset>& extra) {
  auto it = extra.find(name);
  if (it != extra.end()) return it->second;
  const auto& builtins = builtin_presets();
  auto bit = builtins.find(name);
  if (bit != builtins.end()) return bit->second;
  std::string known;
  for (const auto& [n, p] : builtins) known += (known.empty() ? "" : ", ") + n;
  for (const auto& [n, p] : extra) known += ", " + n;
  throw ConfigError("unknown benchmark preset '" + name + "' (known: " + known +
                    ")");
}

}  // namespace ragbench

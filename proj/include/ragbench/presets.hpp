#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ragbench/dataset.hpp"

namespace ragbench {

/// Per-benchmark inference settings: how to read the dataset, what to score,
/// and the generation/retrieval depths the benchmark calls for.
struct BenchmarkPreset {
  std::string name;
  KeyMap keymap;
  std::vector<std::string> metrics;  // accuracy|em|f1|rouge_l|str_em|str_hit
  int max_length = 300;              // generation token budget
  int n_docs = 10;                   // retrieval depth
};

/// The ten built-in benchmark presets.
const std::map<std::string, BenchmarkPreset>& builtin_presets();

/// Presets loaded from a YAML file (name -> preset), overriding/extending
/// the built-ins when merged by the caller.
std::map<std::string, BenchmarkPreset> load_presets_file(
    const std::filesystem::path& path);

/// Built-in (or `extra`-provided) preset by name; ConfigError lists the
/// known names when absent.
BenchmarkPreset resolve_preset(
    const std::string& name,
    const std::map<std::string, BenchmarkPreset>& extra = {});

}  // namespace ragbench

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "ragbench/algorithms.hpp"
#include "ragbench/harness.hpp"
#include "ragbench/presets.hpp"

namespace ragbench {

/// How answers are produced: a deterministic scripted backend (for tests and
/// offline demos) or any OpenAI-compatible completions endpoint.
struct GeneratorConfig {
  std::string backend = "scripted";  // "scripted" | "openai"
  std::string script;                // scripted: path to a response script file
  std::string base_url;              // openai: e.g. http://127.0.0.1:8000
  std::string model;                 // openai: model name sent on the wire
  std::string api_key_env;           // openai: env var holding the key ("" = none)
  std::string completions_path = "/v1/completions";
};

/// Where passages come from: an on-disk index loaded in-process, a remote
/// retrieval service, or nothing (only the no-retrieval strategy works then).
struct RetrieverSetup {
  std::string mode = "none";  // "none" | "local" | "http"
  std::string index;          // local: path to a saved index file
  std::string cache;          // local: optional cache journal path
  std::size_t cache_max_entries = 0;  // local: 0 = unbounded cache
  std::string base_url;       // http: service endpoint
};

/// Everything a run needs, resolved from (defaults < benchmark preset <
/// config file < --set overrides). `algorithms` may list several strategy
/// names for aligned comparisons; `algorithm` carries the shared settings
/// with `algorithm.name` set to the first entry.
struct RunConfig {
  std::vector<std::string> algorithms{"naive"};
  AlgorithmConfig algorithm;
  GeneratorConfig generator;
  RetrieverSetup retriever;

  std::string benchmark;  // preset name; "" = no preset applied
  std::string dataset;    // JSONL benchmark file
  KeyMap keymap;          // dataset field names (preset or explicit)
  std::string instructions_file;  // "" = built-in instruction set
  std::string presets_file;       // "" = built-in presets only

  std::vector<std::string> metrics{"accuracy", "f1"};
  std::size_t sample_size = 0;  // 0 = all items
  std::string output_dir = "runs";
  int parallelism = 1;
  bool resume = true;
  bool save_tracks = false;

  /// The fully resolved settings as a plain tree. Feeding this tree back
  /// through run_config_from_tree reproduces the same RunConfig.
  nlohmann::json effective = nlohmann::json::object();
};

/// Converts a YAML document to a JSON tree with conservative scalar typing:
/// only the exact spellings true/false (any quoting wins) become booleans,
/// so e.g. a bare `no` stays the string "no".
nlohmann::json yaml_to_json(const YAML::Node& node);
nlohmann::json yaml_file_to_json(const std::filesystem::path& path);

/// Applies one `path.to.key=value` override to a config tree, creating
/// intermediate objects as needed. Values get the same scalar typing as YAML.
void apply_override(nlohmann::json& tree, const std::string& assignment);

/// Validates and resolves a config tree into a RunConfig.
/// Unknown keys anywhere in the tree are errors.
RunConfig run_config_from_tree(const nlohmann::json& tree);

/// Loads a YAML config file, applies --set overrides, and resolves it.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

/// Resolves an override-only config (no file), e.g. for quick CLI runs.
RunConfig run_config_from_overrides(const std::vector<std::string>& overrides);

std::shared_ptr<Generator> build_generator(const GeneratorConfig& config);

/// Returns nullptr for mode "none".
std::shared_ptr<Retriever> build_retriever(const RetrieverSetup& config);

std::shared_ptr<const InstructionStore> build_instructions(
    const std::string& instructions_file);

/// Wires generator + retriever + instructions for a config.
AlgorithmContext build_context(const RunConfig& config);

}  // namespace ragbench

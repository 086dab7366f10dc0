#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ragbench/generator.hpp"

namespace ragbench {

/// Deterministic table-driven generator for tests and offline runs.
/// Matching precedence: exact prompt, then substring, then ordinal queue.
/// An unmatched prompt raises ScriptError naming the 3 nearest matchers;
/// more than one substring matcher hitting the same prompt is an
/// ambiguity error.
class ScriptedGenerator : public Generator {
 public:
  void register_exact(const std::string& prompt, GenerationOutput response);
  void register_substring(const std::string& needle, GenerationOutput response);
  void push_ordinal(GenerationOutput response);

  GenerationOutput complete(const std::string& prompt,
                            const GenParams& params) override;
  std::string id() const override { return "scripted"; }

  size_t call_count() const;

  /// Loads a script table from YAML or JSON:
  ///   responses:
  ///     - match: {type: exact|substring|ordinal, pattern: "..."}
  ///       text: "...", finish: stop|length
  ///       tokens: [{t: "...", lp: 0.0, top: [["tok", -0.1], ...]}]  # optional
  static std::shared_ptr<ScriptedGenerator> from_file(
      const std::filesystem::path& path);

 private:
  struct Needle {
    std::string pattern;
    GenerationOutput response;
  };

  mutable std::mutex mu_;
  std::map<std::string, GenerationOutput> exact_;
  std::vector<Needle> substrings_;
  std::deque<GenerationOutput> ordinals_;
  size_t calls_ = 0;
};

}  // namespace ragbench

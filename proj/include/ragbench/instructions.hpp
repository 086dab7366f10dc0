#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ragbench/corpus.hpp"

namespace ragbench {

struct InstructionTemplate {
  std::string name;
  std::string pool;  // system | task | algorithm
  std::vector<std::string> placeholders;
  std::string text;
};

/// Three instruction pools (system / task / algorithm) loaded from one YAML
/// file. Immutable after load; duplicate names within a pool and template
/// placeholders missing from the declared list are load errors.
class InstructionStore {
 public:
  static InstructionStore load(const std::filesystem::path& path);
  static InstructionStore from_yaml_string(const std::string& yaml,
                                           const std::string& origin = "<inline>");

  const InstructionTemplate& get(const std::string& pool,
                                 const std::string& name) const;
  bool contains(const std::string& pool, const std::string& name) const;
  size_t size() const;

 private:
  void add(InstructionTemplate tpl, const std::string& origin);

  // pool -> name -> template
  std::map<std::string, std::map<std::string, InstructionTemplate>> pools_;
};

/// One prompt = system + task + algorithm template refs plus the values for
/// every placeholder the three templates use.
struct PromptAssembly {
  std::string system;
  std::string task;
  std::string algorithm;
  std::map<std::string, std::string> bindings;
};

/// Deterministic substitution; the rendered non-empty parts are joined with
/// blank lines. An unbound placeholder raises ConfigError naming it.
std::string render(const InstructionStore& store, const PromptAssembly& assembly);

/// Renders a single template (used for phase prompts that do not embed the
/// shared task template).
std::string render_template(const InstructionTemplate& tpl,
                            const std::map<std::string, std::string>& bindings);

/// Numbered context blocks: "[1] title\ntext\n\n[2] ...".
std::string format_passages(std::span<const Passage> passages);

/// Default instruction pools shipped with the library; used when no pools
/// file is configured.
const std::string& default_instructions_yaml();

}  // namespace ragbench

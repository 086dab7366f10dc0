#include "ragbench/instructions.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ragbench/errors.hpp"

namespace ragbench {
namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Placeholders look like {name}; "{{" and "}}" are literal braces.
std::vector<std::string> scan_placeholders(const std::string& text) {
  std::vector<std::string> out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '{') {
      if (i + 1 < text.size() && text[i + 1] == '{') {
        ++i;
        continue;
      }
      size_t j = i + 1;
      if (j < text.size() && is_name_start(text[j])) {
        ++j;
        while (j < text.size() && is_name_char(text[j])) ++j;
        if (j < text.size() && text[j] == '}') {
          out.push_back(text.substr(i + 1, j - i - 1));
          i = j;
        }
      }
    } else if (text[i] == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      ++i;
    }
  }
  return out;
}

std::string substitute(const std::string& text,
                       const std::map<std::string, std::string>& bindings,
                       const std::string& template_name) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '{') {
      if (i + 1 < text.size() && text[i + 1] == '{') {
        out.push_back('{');
        ++i;
        continue;
      }
      size_t j = i + 1;
      if (j < text.size() && is_name_start(text[j])) {
        ++j;
        while (j < text.size() && is_name_char(text[j])) ++j;
        if (j < text.size() && text[j] == '}') {
          std::string name = text.substr(i + 1, j - i - 1);
          auto it = bindings.find(name);
          if (it == bindings.end()) {
            throw ConfigError("render: unbound placeholder {" + name +
                              "} in template '" + template_name + "'");
          }
          out += it->second;
          i = j;
          continue;
        }
      }
      out.push_back('{');
    } else if (text[i] == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      out.push_back('}');
      ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

}  // namespace

void InstructionStore::add(InstructionTemplate tpl, const std::string& origin) {
  if (tpl.pool != "system" && tpl.pool != "task" && tpl.pool != "algorithm") {
    throw ConfigError(origin + ": unknown instruction pool '" + tpl.pool + "'");
  }
  auto& pool = pools_[tpl.pool];
  if (pool.count(tpl.name)) {
    throw ConfigError(origin + ": duplicate template name '" + tpl.name +
                      "' in pool '" + tpl.pool + "'");
  }
  std::set<std::string> declared(tpl.placeholders.begin(), tpl.placeholders.end());
  for (const auto& used : scan_placeholders(tpl.text)) {
    if (!declared.count(used)) {
      throw ConfigError(origin + ": template '" + tpl.name +
                        "' uses undeclared placeholder {" + used + "}");
    }
  }
  pool.emplace(tpl.name, std::move(tpl));
}

InstructionStore InstructionStore::load(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot load instruction pools from " + path.string() +
                      ": " + e.what());
  }
  InstructionStore store;
  for (const char* pool : {"system", "task", "algorithm"}) {
    if (!root[pool]) continue;
    for (const auto& node : root[pool]) {
      InstructionTemplate tpl;
      tpl.pool = pool;
      if (!node["name"] || !node["template"]) {
        throw ConfigError(path.string() + ": every template needs 'name' and "
                          "'template' fields (pool '" + std::string(pool) + "')");
      }
      tpl.name = node["name"].as<std::string>();
      tpl.text = node["template"].as<std::string>();
      if (node["placeholders"]) {
        for (const auto& p : node["placeholders"]) {
          tpl.placeholders.push_back(p.as<std::string>());
        }
      }
      store.add(std::move(tpl), path.string());
    }
  }
  if (store.size() == 0) {
    throw ConfigError(path.string() + ": no templates found (expected pools "
                      "system/task/algorithm)");
  }
  return store;
}

InstructionStore InstructionStore::from_yaml_string(const std::string& yaml,
                                                    const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot parse instruction pools (" + origin + "): " +
                      e.what());
  }
  InstructionStore store;
  for (const char* pool : {"system", "task", "algorithm"}) {
    if (!root[pool]) continue;
    for (const auto& node : root[pool]) {
      InstructionTemplate tpl;
      tpl.pool = pool;
      tpl.name = node["name"].as<std::string>();
      tpl.text = node["template"].as<std::string>();
      if (node["placeholders"]) {
        for (const auto& p : node["placeholders"]) {
          tpl.placeholders.push_back(p.as<std::string>());
        }
      }
      store.add(std::move(tpl), origin);
    }
  }
  return store;
}

const InstructionTemplate& InstructionStore::get(const std::string& pool,
                                                 const std::string& name) const {
  auto pit = pools_.find(pool);
  if (pit != pools_.end()) {
    auto tit = pit->second.find(name);
    if (tit != pit->second.end()) return tit->second;
  }
  throw ConfigError("no template '" + name + "' in instruction pool '" + pool +
                    "'");
}

bool InstructionStore::contains(const std::string& pool,
                                const std::string& name) const {
  auto pit = pools_.find(pool);
  return pit != pools_.end() && pit->second.count(name) > 0;
}

size_t InstructionStore::size() const {
  size_t n = 0;
  for (const auto& [pool, templates] : pools_) n += templates.size();
  return n;
}

std::string render_template(const InstructionTemplate& tpl,
                            const std::map<std::string, std::string>& bindings) {
  return substitute(tpl.text, bindings, tpl.name);
}

std::string render(const InstructionStore& store, const PromptAssembly& assembly) {
  std::vector<std::string> parts;
  parts.push_back(render_template(store.get("system", assembly.system),
                                  assembly.bindings));
  parts.push_back(render_template(store.get("task", assembly.task),
                                  assembly.bindings));
  parts.push_back(render_template(store.get("algorithm", assembly.algorithm),
                                  assembly.bindings));
  std::string out;
  for (const auto& part : parts) {
    if (part.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += part;
  }
  return out;
}

std::string format_passages(std::span<const Passage> passages) {
  std::string out;
  for (size_t i = 0; i < passages.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "[" + std::to_string(i + 1) + "] " + passages[i].title + "\n" +
           passages[i].text;
  }
  return out;
}

const std::string& default_instructions_yaml() {
  static const std::string yaml = R"YAML(
system:
  - name: default
    placeholders: []
    template: "You are a knowledgeable assistant. Answer accurately and concisely."

task:
  - name: default
    placeholders: [query]
    template: "Answer the following question.\n\nQuestion: {query}"
  - name: popqa
    placeholders: [query]
    template: "Answer the following question about an entity.\n\nQuestion: {query}"
  - name: triviaqa
    placeholders: [query]
    template: "Answer the following trivia question.\n\nQuestion: {query}"
  - name: hotpotqa
    placeholders: [query]
    template: "Answer the following question. It may require combining facts from several sources.\n\nQuestion: {query}"
  - name: 2wikimultihopqa
    placeholders: [query]
    template: "Answer the following multi-hop question.\n\nQuestion: {query}"
  - name: arc
    placeholders: [query, choices]
    template: "Pick the correct answer to the question. Reply with the letter of the correct choice.\n\nQuestion: {query}\n\nChoices:\n{choices}"
  - name: mmlu
    placeholders: [query, choices]
    template: "Answer the multiple-choice question. Reply with the letter of the correct choice.\n\nQuestion: {query}\n\nChoices:\n{choices}"
  - name: pubhealth
    placeholders: [query]
    template: "Decide whether the following claim is true or false. Answer 'true' or 'false'.\n\nClaim: {query}"
  - name: strategyqa
    placeholders: [query]
    template: "Answer the following yes/no question. Answer 'yes' or 'no'.\n\nQuestion: {query}"
  - name: factscore
    placeholders: [query]
    template: "Write a short, factually accurate biography.\n\nSubject: {query}"
  - name: asqa
    placeholders: [query]
    template: "Answer the following ambiguous question comprehensively, covering every plausible interpretation.\n\nQuestion: {query}"

algorithm:
  - name: direct
    placeholders: []
    template: "Answer:"
  - name: naive
    placeholders: [passages]
    template: "Refer to the passages below when answering.\n\nPassages:\n{passages}\n\nAnswer:"
  - name: rrr_rewrite
    placeholders: [query]
    template: "Rewrite the question into a concise search query that will retrieve the most relevant passages. Output only the rewritten query.\n\nQuestion: {query}\n\nRewritten query:"
  - name: rrr_read
    placeholders: [passages]
    template: "Refer to the passages below when answering.\n\nPassages:\n{passages}\n\nAnswer:"
  - name: iter_retgen
    placeholders: [passages]
    template: "Refer to the passages below when answering. Improve on earlier drafts if the passages contradict them.\n\nPassages:\n{passages}\n\nAnswer:"
  - name: self_ask
    placeholders: [scratchpad]
    template: "Decompose the question if needed. Pose sub-questions with 'Follow up:' and answer them with 'Intermediate answer:'. When done, conclude with 'So the final answer is:'.\n\n{scratchpad}"
  - name: self_ask_intermediate
    placeholders: [scratchpad, followup, passages]
    template: "Decompose the question if needed. Pose sub-questions with 'Follow up:' and answer them with 'Intermediate answer:'. When done, conclude with 'So the final answer is:'.\n\n{scratchpad}Follow up: {followup}\nContext:\n{passages}\nIntermediate answer:"
  - name: active_rag_draft
    placeholders: [context]
    template: "Continue the answer one sentence at a time.\n\nAnswer so far: {context}\n\nNext sentence:"
  - name: active_rag_regen
    placeholders: [passages, context]
    template: "Use the passages below to rewrite the next sentence of the answer.\n\nPassages:\n{passages}\n\nAnswer so far: {context}\n\nNext sentence:"
  - name: self_rag_continue
    placeholders: [context]
    template: "Continue the answer.\n\nAnswer so far: {context}\n\nContinuation:"
  - name: self_rag_passage
    placeholders: [passages, context]
    template: "Use the passage below to write the next segment of the answer, then judge its relevance, support, and utility.\n\nPassage:\n{passages}\n\nAnswer so far: {context}\n\nNext segment:"
)YAML";
  return yaml;
}

}  // namespace ragbench

#include "ragbench/scripted_generator.hpp"

#include <algorithm>

#include <yaml-cpp/yaml.h>

#include "ragbench/errors.hpp"
#include "ragbench/util.hpp"

namespace ragbench {

void ScriptedGenerator::register_exact(const std::string& prompt,
                                       GenerationOutput response) {
  std::lock_guard<std::mutex> lock(mu_);
  if (exact_.count(prompt)) {
    throw ScriptError("duplicate exact matcher for prompt: " +
                      prompt.substr(0, 80));
  }
  exact_.emplace(prompt, std::move(response));
}

void ScriptedGenerator::register_substring(const std::string& needle,
                                           GenerationOutput response) {
  std::lock_guard<std::mutex> lock(mu_);
  substrings_.push_back({needle, std::move(response)});
}

void ScriptedGenerator::push_ordinal(GenerationOutput response) {
  std::lock_guard<std::mutex> lock(mu_);
  ordinals_.push_back(std::move(response));
}

GenerationOutput ScriptedGenerator::complete(const std::string& prompt,
                                             const GenParams& params) {
  (void)params;  // scripted responses are returned verbatim
  std::lock_guard<std::mutex> lock(mu_);
  ++calls_;

  auto it = exact_.find(prompt);
  if (it != exact_.end()) return it->second;

  const Needle* hit = nullptr;
  for (const auto& n : substrings_) {
    if (prompt.find(n.pattern) != std::string::npos) {
      if (hit != nullptr) {
        throw ScriptError("ambiguous script: substring matchers '" +
                          hit->pattern + "' and '" + n.pattern +
                          "' both match prompt: " + prompt.substr(0, 80));
      }
      hit = &n;
    }
  }
  if (hit != nullptr) return hit->response;

  if (!ordinals_.empty()) {
    GenerationOutput out = std::move(ordinals_.front());
    ordinals_.pop_front();
    return out;
  }

  // Rank registered matchers by edit distance to the prompt and name the
  // closest three in the error.
  std::vector<std::pair<size_t, std::string>> ranked;
  for (const auto& [pattern, resp] : exact_) {
    (void)resp;
    ranked.emplace_back(levenshtein(prompt, pattern), "exact:" + pattern.substr(0, 60));
  }
  for (const auto& n : substrings_) {
    ranked.emplace_back(levenshtein(prompt, n.pattern),
                        "substring:" + n.pattern.substr(0, 60));
  }
  std::sort(ranked.begin(), ranked.end());
  std::string msg = "scripted generator: no matcher for prompt: \"" +
                    prompt.substr(0, 120) + "\"";
  if (ranked.empty()) {
    msg += " (script table is empty)";
  } else {
    msg += "; nearest matchers:";
    for (size_t i = 0; i < std::min<size_t>(3, ranked.size()); ++i) {
      msg += " [" + ranked[i].second + "]";
    }
  }
  throw ScriptError(msg);
}

size_t ScriptedGenerator::call_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

namespace {

GenerationOutput output_from_node(const YAML::Node& node) {
  std::string text = node["text"] ? node["text"].as<std::string>() : "";
  FinishReason finish = FinishReason::stop;
  if (node["finish"] && node["finish"].as<std::string>() == "length") {
    finish = FinishReason::length;
  }
  if (!node["tokens"]) return make_output(text, finish);
  GenerationOutput out;
  out.text = text;
  out.finish = finish;
  for (const auto& t : node["tokens"]) {
    TokenLogprob tok;
    tok.token = t["t"].as<std::string>();
    tok.logprob = t["lp"] ? t["lp"].as<double>() : 0.0;
    if (t["top"]) {
      for (const auto& alt : t["top"]) {
        tok.top.emplace_back(alt[0].as<std::string>(), alt[1].as<double>());
      }
    } else {
      tok.top = {{tok.token, tok.logprob}};
    }
    out.tokens.push_back(std::move(tok));
  }
  return out;
}

}  // namespace

std::shared_ptr<ScriptedGenerator> ScriptedGenerator::from_file(
    const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot load script file " + path.string() + ": " + e.what());
  }
  auto gen = std::make_shared<ScriptedGenerator>();
  const YAML::Node responses = root["responses"];
  if (!responses || !responses.IsSequence()) {
    throw ConfigError("script file " + path.string() +
                      " needs a top-level 'responses' sequence");
  }
  for (const auto& entry : responses) {
    const YAML::Node match = entry["match"];
    std::string type = match && match["type"] ? match["type"].as<std::string>()
                                              : "ordinal";
    GenerationOutput out = output_from_node(entry);
    if (type == "exact") {
      gen->register_exact(match["pattern"].as<std::string>(), std::move(out));
    } else if (type == "substring") {
      gen->register_substring(match["pattern"].as<std::string>(), std::move(out));
    } else if (type == "ordinal") {
      gen->push_ordinal(std::move(out));
    } else {
      throw ConfigError("script file " + path.string() +
                        ": unknown matcher type '" + type + "'");
    }
  }
  return gen;
}

}  // namespace ragbench

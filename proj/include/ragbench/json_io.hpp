#pragma once

#include <nlohmann/json.hpp>

#include "ragbench/corpus.hpp"
#include "ragbench/generator.hpp"

namespace ragbench {

inline void to_json(nlohmann::json& j, const Passage& p) {
  j = nlohmann::json{
      {"id", p.id}, {"title", p.title}, {"text", p.text}, {"score", p.score}};
}

inline void from_json(const nlohmann::json& j, Passage& p) {
  j.at("id").get_to(p.id);
  j.at("title").get_to(p.title);
  j.at("text").get_to(p.text);
  p.score = j.value("score", 0.0);
}

inline void to_json(nlohmann::json& j, const TokenLogprob& t) {
  j = nlohmann::json{{"token", t.token}, {"logprob", t.logprob}, {"top", t.top}};
}

inline void from_json(const nlohmann::json& j, TokenLogprob& t) {
  j.at("token").get_to(t.token);
  j.at("logprob").get_to(t.logprob);
  t.top.clear();
  if (j.contains("top")) j.at("top").get_to(t.top);
}

inline void to_json(nlohmann::json& j, const GenerationOutput& o) {
  j = nlohmann::json{{"text", o.text},
                     {"tokens", o.tokens},
                     {"finish", finish_reason_name(o.finish)}};
}

inline void from_json(const nlohmann::json& j, GenerationOutput& o) {
  j.at("text").get_to(o.text);
  o.tokens.clear();
  if (j.contains("tokens")) j.at("tokens").get_to(o.tokens);
  o.finish = j.value("finish", "stop") == std::string("length")
                 ? FinishReason::length
                 : FinishReason::stop;
}

inline void to_json(nlohmann::json& j, const GenParams& p) {
  j = nlohmann::json{{"max_new_tokens", p.max_new_tokens},
                     {"temperature", p.temperature},
                     {"seed", p.seed},
                     {"logprobs_top_k", p.logprobs_top_k},
                     {"stop", p.stop}};
}

inline void from_json(const nlohmann::json& j, GenParams& p) {
  p.max_new_tokens = j.value("max_new_tokens", p.max_new_tokens);
  p.temperature = j.value("temperature", p.temperature);
  p.seed = j.value("seed", p.seed);
  p.logprobs_top_k = j.value("logprobs_top_k", p.logprobs_top_k);
  if (j.contains("stop")) j.at("stop").get_to(p.stop);
}

}  // namespace ragbench

#include "ragbench/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace ragbench {

const char* finish_reason_name(FinishReason r) {
  return r == FinishReason::stop ? "stop" : "length";
}

std::vector<double> candidate_probability(
    const GenerationOutput& output, size_t position,
    const std::vector<std::string>& candidates) {
  if (position >= output.tokens.size()) {
    throw std::out_of_range("candidate_probability: position " +
                            std::to_string(position) + " out of range (" +
                            std::to_string(output.tokens.size()) + " tokens)");
  }
  const TokenLogprob& tok = output.tokens[position];
  std::vector<double> probs;
  probs.reserve(candidates.size());
  for (const auto& cand : candidates) {
    double p = kFloorProbability;
    bool found = false;
    for (const auto& [alt, lp] : tok.top) {
      if (alt == cand) {
        p = std::exp(lp);
        found = true;
        break;
      }
    }
    if (!found && cand == tok.token) p = std::exp(tok.logprob);
    probs.push_back(p);
  }
  return probs;
}

std::vector<double> candidate_distribution(
    const GenerationOutput& output, size_t position,
    const std::vector<std::string>& candidates) {
  auto probs = candidate_probability(output, position, candidates);
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (sum > 0.0) {
    for (double& p : probs) p /= sum;
  }
  return probs;
}

GenerationOutput make_output(const std::string& text, FinishReason finish) {
  GenerationOutput out;
  out.text = text;
  out.finish = finish;
  // Split so whitespace stays attached to the token that follows it; the
  // concatenation of token texts must reproduce `text` byte-exactly.
  size_t i = 0;
  while (i < text.size()) {
    size_t ws = i;
    while (ws < text.size() && (text[ws] == ' ' || text[ws] == '\n' ||
                                text[ws] == '\t' || text[ws] == '\r')) {
      ++ws;
    }
    size_t end = ws;
    while (end < text.size() && text[end] != ' ' && text[end] != '\n' &&
           text[end] != '\t' && text[end] != '\r') {
      ++end;
    }
    TokenLogprob tok;
    tok.token = text.substr(i, end - i);  // trailing whitespace forms its own token
    tok.logprob = 0.0;
    tok.top = {{tok.token, 0.0}};
    out.tokens.push_back(std::move(tok));
    i = end;
  }
  return out;
}

}  // namespace ragbench

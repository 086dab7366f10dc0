#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/corpus.hpp"
#include "ragbench/generator.hpp"

namespace ragbench {

/// One retriever call: the query as issued, the requested depth, and what
/// came back.
struct RetrievalStep {
  std::string query;
  int k = 0;
  std::vector<Passage> passages;
  bool cache_hit = false;
};

/// One generator call. `label` names the phase within the algorithm that
/// issued it (e.g. "answer", "rewrite", "lookahead").
struct GenerationStep {
  std::string label;
  std::string prompt;
  GenerationOutput output;
};

/// A control-flow choice the algorithm made between calls. `kind` names the
/// decision point, `detail` is a short human-readable rationale, and `data`
/// carries structured extras (scores, probabilities, ...).
struct DecisionStep {
  std::string kind;
  std::string detail;
  nlohmann::json data = nlohmann::json::object();
};

using TrackStep = std::variant<RetrievalStep, GenerationStep, DecisionStep>;

/// Ordered record of everything an algorithm did to answer one query.
struct GenerationTrack {
  std::string algorithm;
  std::string query;
  std::vector<TrackStep> steps;
  std::string answer;

  void add(RetrievalStep step) { steps.emplace_back(std::move(step)); }
  void add(GenerationStep step) { steps.emplace_back(std::move(step)); }
  void add(DecisionStep step) { steps.emplace_back(std::move(step)); }

  size_t retrieval_count() const;
  size_t generation_count() const;
  size_t decision_count() const;
  /// Sum of generated token counts across all generation steps.
  size_t generated_tokens() const;
};

void to_json(nlohmann::json& j, const RetrievalStep& s);
void to_json(nlohmann::json& j, const GenerationStep& s);
void to_json(nlohmann::json& j, const DecisionStep& s);
void to_json(nlohmann::json& j, const GenerationTrack& t);

/// Multi-line human-readable rendering (one numbered block per step).
std::string format_track(const GenerationTrack& track);

}  // namespace ragbench

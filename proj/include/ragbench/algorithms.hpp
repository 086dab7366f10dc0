#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ragbench/generator.hpp"
#include "ragbench/instructions.hpp"
#include "ragbench/retriever.hpp"
#include "ragbench/track.hpp"

namespace ragbench {

struct IterRetgenConfig {
  int max_iteration = 3;
};

struct SelfAskConfig {
  int max_iteration = 5;
  std::string followup_marker = "Follow up:";
  std::string intermediate_marker = "Intermediate answer:";
  std::string final_marker = "So the final answer is:";
};

struct ActiveRagConfig {
  double filter_prob = 0.8;
  double masked_prob = 0.4;
  std::string query_formulation = "implicit";
};

/// Reflection tokens the self-reflective strategy reads from generator
/// outputs. Plain configurable strings: served models may tokenize special
/// markers differently.
struct ReflectionVocab {
  std::string retrieve_yes = "[Retrieval]";
  std::string retrieve_no = "[No Retrieval]";
  std::string rel_yes = "[Relevant]";
  std::string rel_no = "[Irrelevant]";
  std::string sup_full = "[Fully supported]";
  std::string sup_partial = "[Partially supported]";
  std::string sup_none = "[No support / Contradictory]";
  std::vector<std::string> utility = {"[Utility:1]", "[Utility:2]",
                                      "[Utility:3]", "[Utility:4]",
                                      "[Utility:5]"};
  /// Every marker above, for stripping them out of answer segments.
  std::vector<std::string> all_markers() const;
};

struct SelfRagConfig {
  int beam_width = 2;
  int max_depth = 7;
  double w_rel = 1.0;
  double w_sup = 1.0;
  double w_use = 0.5;
  double threshold = 0.2;
  std::string mode = "adaptive";  // always | adaptive | no
  /// Compare the raw (unnormalized) retrieve-token probability against the
  /// threshold instead of the yes/no-normalized one.
  bool adaptive_raw = false;
  ReflectionVocab vocab;
};

struct AlgorithmConfig {
  std::string name = "naive";
  int n_docs = 10;
  GenParams gen;
  std::string system_instruction = "default";
  std::string task_instruction = "default";
  /// Answer-producing template in the algorithm pool; empty selects the
  /// per-algorithm default.
  std::string algorithm_instruction;
  /// Extra prompt phases (e.g. "rewrite") -> template name; a missing entry
  /// defaults to "<algorithm>_<phase>".
  std::map<std::string, std::string> phase_instructions;

  IterRetgenConfig iter_retgen;
  SelfAskConfig self_ask;
  ActiveRagConfig active_rag;
  SelfRagConfig self_rag;

  /// Throws ConfigError on out-of-range values or an unknown name/mode.
  void validate() const;
};

/// Shared wiring one inference runs against.
struct AlgorithmContext {
  std::shared_ptr<Retriever> retriever;  // may be null for no-retrieval runs
  std::shared_ptr<Generator> generator;
  std::shared_ptr<const InstructionStore> instructions;
};

/// Base class for the inference strategies: owns the context, renders
/// prompts, and appends every retriever/generator call to the track.
/// Subclasses override run().
class RagAlgorithm {
 public:
  RagAlgorithm(std::string name, std::string default_main_template,
               AlgorithmContext ctx, AlgorithmConfig config);
  virtual ~RagAlgorithm() = default;

  const std::string& name() const { return name_; }
  const AlgorithmConfig& config() const { return config_; }
  const AlgorithmContext& context() const { return ctx_; }

  /// Template name for the answer-producing prompt.
  std::string main_template() const;
  /// Template name for an auxiliary phase.
  std::string phase_template(const std::string& phase) const;

  /// One full inference. On generator/retriever failure the error carries
  /// the partial track in the returned exception's message only; steps up
  /// to the failure are preserved in `partial` when supplied.
  GenerationTrack infer(const std::string& query,
                        const std::map<std::string, std::string>& extra_bindings = {},
                        GenerationTrack* partial = nullptr);

 protected:
  virtual void run(GenerationTrack& track, const std::string& query,
                   std::map<std::string, std::string>& bindings) = 0;

  /// Full system+task+algorithm assembly.
  std::string assemble(const std::string& algorithm_template,
                       const std::map<std::string, std::string>& bindings) const;
  /// Renders one algorithm-pool template on its own (auxiliary phases).
  std::string render_alone(const std::string& algorithm_template,
                           const std::map<std::string, std::string>& bindings) const;

  /// Calls the generator and appends a GenerationStep. Returns a copy of the
  /// output: references into the track go stale as further steps land.
  GenerationOutput generate(GenerationTrack& track, const std::string& label,
                            const std::string& prompt);
  GenerationOutput generate(GenerationTrack& track, const std::string& label,
                            const std::string& prompt, const GenParams& params);
  /// Calls the retriever and appends a RetrievalStep; returns the passages.
  std::vector<Passage> retrieve(GenerationTrack& track, const std::string& query,
                                int k);

  Retriever& retriever() const;

  std::string name_;
  std::string default_main_;
  AlgorithmContext ctx_;
  AlgorithmConfig config_;
};

/// Names accepted by make_algorithm, in canonical order.
const std::vector<std::string>& algorithm_names();

// JSON echoes of the configs (reports, fingerprints). Keys match the YAML
// config keys.
void to_json(nlohmann::json& j, const IterRetgenConfig& c);
void to_json(nlohmann::json& j, const SelfAskConfig& c);
void to_json(nlohmann::json& j, const ActiveRagConfig& c);
void to_json(nlohmann::json& j, const ReflectionVocab& v);
void to_json(nlohmann::json& j, const SelfRagConfig& c);
void to_json(nlohmann::json& j, const AlgorithmConfig& c);

/// Factory keyed on config.name; validates the config first.
std::unique_ptr<RagAlgorithm> make_algorithm(AlgorithmConfig config,
                                             AlgorithmContext ctx);

// ---- Pure helpers used by the strategies (exposed for direct testing) ----

/// Marker scan for the decompose-and-answer strategy.
struct MarkerScan {
  bool has_followup = false;
  bool has_final = false;
  std::string followup;      // text after the follow-up marker, same line
  std::string final_answer;  // text after the final marker, trimmed
};
MarkerScan scan_markers(const std::string& text, const SelfAskConfig& cfg);

/// exp(logprob) of each sampled token.
std::vector<double> token_probabilities(const GenerationOutput& output);

/// Token index range [begin, end) covering the first `byte_count` bytes of
/// the output text (a token straddling the boundary is included).
struct TokenSlice {
  size_t begin = 0;
  size_t end = 0;
};
TokenSlice sentence_token_slice(const GenerationOutput& output, size_t byte_count);

/// The confidence-masked retrieval query: tokens in the slice whose
/// probability is below `masked_prob` are dropped, the rest joined and
/// whitespace-normalized.
std::string masked_query(const GenerationOutput& output, TokenSlice slice,
                         double masked_prob);

/// Per-candidate reflection judgment read from one generation output.
struct SegmentJudgment {
  double p_rel = 0.0;  // normalized P(relevant)
  double p_sup = 0.0;  // 1.0*P(full) + 0.5*P(partial) + 0.0*P(none), normalized
  double p_use = 0.0;  // (E[grade]-1)/4 over normalized grade distribution
  bool degraded_rel = false;  // marker position missing -> uniform fallback
  bool degraded_sup = false;
  bool degraded_use = false;
};
SegmentJudgment judge_segment(const GenerationOutput& output,
                              const ReflectionVocab& vocab);

/// S = w_rel*p_rel + w_sup*p_sup + w_use*p_use.
double segment_score(const SegmentJudgment& judgment, const SelfRagConfig& cfg);

}  // namespace ragbench

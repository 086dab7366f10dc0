#include "ragbench/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "ragbench/errors.hpp"
#include "ragbench/json_io.hpp"
#include "ragbench/sentence.hpp"
#include "ragbench/util.hpp"

namespace ragbench {

using nlohmann::json;

// ---------------------------------------------------------------- config ---

std::vector<std::string> ReflectionVocab::all_markers() const {
  std::vector<std::string> out = {retrieve_yes, retrieve_no, rel_yes,  rel_no,
                                  sup_full,     sup_partial, sup_none};
  out.insert(out.end(), utility.begin(), utility.end());
  return out;
}

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {
      "direct", "naive", "rrr", "iter_retgen", "self_ask", "active_rag",
      "self_rag"};
  return names;
}

void AlgorithmConfig::validate() const {
  const auto& names = algorithm_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : "|") + n;
    throw ConfigError("unknown algorithm '" + name + "' (expected one of " +
                      known + ")");
  }
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (n_docs < 1) throw ConfigError("n_docs must be >= 1");
  if (gen.max_new_tokens < 1) throw ConfigError("gen.max_new_tokens must be >= 1");
  if (gen.temperature < 0.0) throw ConfigError("gen.temperature must be >= 0");
  if (gen.logprobs_top_k < 0) throw ConfigError("gen.logprobs_top_k must be >= 0");
  if (iter_retgen.max_iteration < 1) {
    throw ConfigError("iter_retgen.max_iteration must be >= 1");
  }
  if (self_ask.max_iteration < 1) {
    throw ConfigError("self_ask.max_iteration must be >= 1");
  }
  if (!in01(active_rag.filter_prob)) {
    throw ConfigError("active_rag.filter_prob must be in [0,1]");
  }
  if (!in01(active_rag.masked_prob)) {
    throw ConfigError("active_rag.masked_prob must be in [0,1]");
  }
  if (active_rag.query_formulation != "implicit") {
    throw ConfigError("active_rag.query_formulation: only 'implicit' is supported");
  }
  if (self_rag.beam_width < 1) throw ConfigError("self_rag.beam_width must be >= 1");
  if (self_rag.max_depth < 1) throw ConfigError("self_rag.max_depth must be >= 1");
  if (!in01(self_rag.threshold)) {
    throw ConfigError("self_rag.threshold must be in [0,1]");
  }
  if (self_rag.mode != "always" && self_rag.mode != "adaptive" &&
      self_rag.mode != "no") {
    throw ConfigError("self_rag.mode must be one of always|adaptive|no (got '" +
                      self_rag.mode + "')");
  }
}

// ------------------------------------------------------------ base class ---

RagAlgorithm::RagAlgorithm(std::string name, std::string default_main_template,
                           AlgorithmContext ctx, AlgorithmConfig config)
    : name_(std::move(name)),
      default_main_(std::move(default_main_template)),
      ctx_(std::move(ctx)),
      config_(std::move(config)) {
  if (!ctx_.generator) throw ConfigError(name_ + ": generator not configured");
  if (!ctx_.instructions) {
    throw ConfigError(name_ + ": instruction store not configured");
  }
}

GenerationTrack RagAlgorithm::infer(
    const std::string& query,
    const std::map<std::string, std::string>& extra_bindings,
    GenerationTrack* partial) {
  GenerationTrack track;
  track.algorithm = name_;
  track.query = query;
  std::map<std::string, std::string> bindings = extra_bindings;
  bindings["query"] = query;
  bindings.emplace("choices", "");
  try {
    run(track, query, bindings);
  } catch (...) {
    if (partial) *partial = track;
    throw;
  }
  return track;
}

std::string RagAlgorithm::main_template() const {
  return config_.algorithm_instruction.empty() ? default_main_
                                               : config_.algorithm_instruction;
}

std::string RagAlgorithm::phase_template(const std::string& phase) const {
  auto it = config_.phase_instructions.find(phase);
  return it != config_.phase_instructions.end() ? it->second
                                                : name_ + "_" + phase;
}

std::string RagAlgorithm::assemble(
    const std::string& algorithm_template,
    const std::map<std::string, std::string>& bindings) const {
  PromptAssembly assembly;
  assembly.system = config_.system_instruction;
  assembly.task = config_.task_instruction;
  assembly.algorithm = algorithm_template;
  assembly.bindings = bindings;
  return render(*ctx_.instructions, assembly);
}

std::string RagAlgorithm::render_alone(
    const std::string& algorithm_template,
    const std::map<std::string, std::string>& bindings) const {
  return render_template(ctx_.instructions->get("algorithm", algorithm_template),
                         bindings);
}

GenerationOutput RagAlgorithm::generate(GenerationTrack& track,
                                        const std::string& label,
                                        const std::string& prompt) {
  return generate(track, label, prompt, config_.gen);
}

GenerationOutput RagAlgorithm::generate(GenerationTrack& track,
                                        const std::string& label,
                                        const std::string& prompt,
                                        const GenParams& params) {
  GenerationStep step;
  step.label = label;
  step.prompt = prompt;
  step.output = ctx_.generator->complete(prompt, params);
  GenerationOutput out = step.output;
  track.add(std::move(step));
  return out;
}

std::vector<Passage> RagAlgorithm::retrieve(GenerationTrack& track,
                                            const std::string& query, int k) {
  SearchResult result = retriever().search(query, k);
  RetrievalStep step;
  step.query = query;
  step.k = k;
  step.passages = result.passages;
  step.cache_hit = result.cache_hit;
  track.add(std::move(step));
  return std::move(result.passages);
}

Retriever& RagAlgorithm::retriever() const {
  if (!ctx_.retriever) {
    throw ConfigError(name_ + ": retriever required but not configured");
  }
  return *ctx_.retriever;
}

// -------------------------------------------------------------- helpers ----

MarkerScan scan_markers(const std::string& text, const SelfAskConfig& cfg) {
  MarkerScan scan;
  size_t fin = text.find(cfg.final_marker);
  if (fin != std::string::npos) {
    scan.has_final = true;
    scan.final_answer = trim(text.substr(fin + cfg.final_marker.size()));
  }
  size_t fu = text.find(cfg.followup_marker);
  if (fu != std::string::npos) {
    scan.has_followup = true;
    size_t start = fu + cfg.followup_marker.size();
    size_t eol = text.find('\n', start);
    scan.followup = trim(eol == std::string::npos
                             ? text.substr(start)
                             : text.substr(start, eol - start));
  }
  return scan;
}

std::vector<double> token_probabilities(const GenerationOutput& output) {
  std::vector<double> probs;
  probs.reserve(output.tokens.size());
  for (const auto& t : output.tokens) probs.push_back(std::exp(t.logprob));
  return probs;
}

TokenSlice sentence_token_slice(const GenerationOutput& output,
                                size_t byte_count) {
  TokenSlice slice;
  size_t covered = 0;
  while (slice.end < output.tokens.size() && covered < byte_count) {
    covered += output.tokens[slice.end].token.size();
    ++slice.end;
  }
  return slice;
}

std::string masked_query(const GenerationOutput& output, TokenSlice slice,
                         double masked_prob) {
  std::string joined;
  for (size_t i = slice.begin; i < slice.end && i < output.tokens.size(); ++i) {
    if (std::exp(output.tokens[i].logprob) < masked_prob) continue;
    joined += output.tokens[i].token;
  }
  return trim(collapse_whitespace(joined));
}

namespace {

// First position whose sampled token (whitespace-trimmed) is one of the
// candidate markers; -1 when absent.
ptrdiff_t find_marker_position(const GenerationOutput& output,
                               const std::vector<std::string>& candidates) {
  for (size_t i = 0; i < output.tokens.size(); ++i) {
    std::string t = trim(output.tokens[i].token);
    for (const auto& c : candidates) {
      if (t == c) return static_cast<ptrdiff_t>(i);
    }
  }
  return -1;
}

}  // namespace

SegmentJudgment judge_segment(const GenerationOutput& output,
                              const ReflectionVocab& vocab) {
  SegmentJudgment j;

  std::vector<std::string> rel = {vocab.rel_yes, vocab.rel_no};
  ptrdiff_t pos = find_marker_position(output, rel);
  if (pos < 0) {
    j.p_rel = 0.5;  // uniform over {relevant, irrelevant}
    j.degraded_rel = true;
  } else {
    j.p_rel = candidate_distribution(output, static_cast<size_t>(pos), rel)[0];
  }

  std::vector<std::string> sup = {vocab.sup_full, vocab.sup_partial,
                                  vocab.sup_none};
  pos = find_marker_position(output, sup);
  if (pos < 0) {
    j.p_sup = 0.5;  // uniform thirds: 1.0/3 + 0.5/3 + 0.0/3
    j.degraded_sup = true;
  } else {
    auto d = candidate_distribution(output, static_cast<size_t>(pos), sup);
    j.p_sup = 1.0 * d[0] + 0.5 * d[1];
  }

  pos = find_marker_position(output, vocab.utility);
  if (pos < 0) {
    j.p_use = 0.5;  // uniform grades: E = (1+n)/2 rescaled
    j.degraded_use = true;
  } else {
    auto d = candidate_distribution(output, static_cast<size_t>(pos),
                                    vocab.utility);
    double expectation = 0.0;
    for (size_t g = 0; g < d.size(); ++g) {
      expectation += static_cast<double>(g + 1) * d[g];
    }
    double span = std::max<double>(1.0, static_cast<double>(d.size()) - 1.0);
    j.p_use = (expectation - 1.0) / span;
  }
  return j;
}

double segment_score(const SegmentJudgment& judgment, const SelfRagConfig& cfg) {
  return cfg.w_rel * judgment.p_rel + cfg.w_sup * judgment.p_sup +
         cfg.w_use * judgment.p_use;
}

namespace {

// Answer segments are joined with a single space; empty segments add nothing.
void append_segment(std::string& answer, const std::string& segment) {
  if (segment.empty()) return;
  if (!answer.empty()) answer += " ";
  answer += segment;
}

// ------------------------------------------------------------ strategies ---

class DirectAlgorithm final : public RagAlgorithm {
 public:
  DirectAlgorithm(AlgorithmContext ctx, AlgorithmConfig cfg)
      : RagAlgorithm("direct", "direct", std::move(ctx), std::move(cfg)) {}

 protected:
  void run(GenerationTrack& track, const std::string& /*query*/,
           std::map<std::string, std::string>& bindings) override {
    GenerationOutput out =
        generate(track, "answer", assemble(main_template(), bindings));
    track.answer = out.text;
  }
};

class NaiveAlgorithm final : public RagAlgorithm {
 public:
  NaiveAlgorithm(AlgorithmContext ctx, AlgorithmConfig cfg)
      : RagAlgorithm("naive", "naive", std::move(ctx), std::move(cfg)) {}

 protected:
  void run(GenerationTrack& track, const std::string& query,
           std::map<std::string, std::string>& bindings) override {
    std::vector<Passage> passages = retrieve(track, query, config_.n_docs);
    if (passages.empty()) {
      track.add(DecisionStep{"empty_retrieval",
                             "retriever returned no passages; answering with "
                             "an empty context block"});
    }
    bindings["passages"] = format_passages(passages);
    GenerationOutput out =
        generate(track, "answer", assemble(main_template(), bindings));
    track.answer = out.text;
  }
};

class RrrAlgorithm final : public RagAlgorithm {
 public:
  RrrAlgorithm(AlgorithmContext ctx, AlgorithmConfig cfg)
      : RagAlgorithm("rrr", "rrr_read", std::move(ctx), std::move(cfg)) {}

 protected:
  void run(GenerationTrack& track, const std::string& query,
           std::map<std::string, std::string>& bindings) override {
    GenerationOutput rewrite = generate(
        track, "rewrite", render_alone(phase_template("rewrite"), bindings));
    std::string rewritten = trim(rewrite.text);
    if (rewritten.empty()) {
      track.add(DecisionStep{"rewrite_fallback",
                             "empty rewrite output; retrieving with the "
                             "original query"});
      rewritten = query;
    } else {
      track.add(DecisionStep{"rewrite", "query rewritten for retrieval",
                             json{{"rewritten_query", rewritten}}});
    }
    std::vector<Passage> passages = retrieve(track, rewritten, config_.n_docs);
    bindings["passages"] = format_passages(passages);
    GenerationOutput out =
        generate(track, "answer", assemble(main_template(), bindings));
    track.answer = out.text;
  }
};

class IterRetgenAlgorithm final : public RagAlgorithm {
 public:
  IterRetgenAlgorithm(AlgorithmContext ctx, AlgorithmConfig cfg)
      : RagAlgorithm("iter_retgen", "iter_retgen", std::move(ctx),
                     std::move(cfg)) {}

 protected:
  void run(GenerationTrack& track, const std::string& query,
           std::map<std::string, std::string>& bindings) override {
    std::string last;
    for (int i = 1; i <= config_.iter_retgen.max_iteration; ++i) {
      std::string retrieval_query = i == 1 ? query : query + " " + last;
      std::vector<Passage> passages =
          retrieve(track, retrieval_query, config_.n_docs);
      bindings["passages"] = format_passages(passages);
      GenerationOutput out =
          generate(track, "iteration_" + std::to_string(i),
                   assemble(main_template(), bindings));
      last = out.text;
    }
    track.answer = last;
  }
};

class SelfAskAlgorithm final : public RagAlgorithm {
 public:
  SelfAskAlgorithm(AlgorithmContext ctx, AlgorithmConfig cfg)
      : RagAlgorithm("self_ask", "self_ask", std::move(ctx), std::move(cfg)) {}

 protected:
  void run(GenerationTrack& track, const std::string& /*query*/,
           std::map<std::string, std::string>& bindings) override {
    const SelfAskConfig& sa = config_.self_ask;
    std::string scratchpad;
    for (int iter = 1; iter <= sa.max_iteration; ++iter) {
      bindings["scratchpad"] = scratchpad;
      GenerationOutput out = generate(track, "continuation",
                                      assemble(main_template(), bindings));
      MarkerScan scan = scan_markers(out.text, sa);
      if (scan.has_final) {
        if (scan.has_followup) {
          track.add(DecisionStep{"both_markers",
                                 "both markers present; the final-answer "
                                 "marker wins"});
        }
        track.add(DecisionStep{"final_marker", "final answer emitted",
                               json{{"iteration", iter}}});
        track.answer = scan.final_answer;
        return;
      }
      if (!scan.has_followup) {
        track.add(DecisionStep{"no_marker",
                               "generation contains neither marker; treated "
                               "as the final answer"});
        track.answer = out.text;
        return;
      }
      std::vector<Passage> passages =
          retrieve(track, scan.followup, config_.n_docs);
      std::map<std::string, std::string> mid_bindings = bindings;
      mid_bindings["followup"] = scan.followup;
      mid_bindings["passages"] = format_passages(passages);
      GenerationOutput mid =
          generate(track, "intermediate",
                   render_alone(phase_template("intermediate"), mid_bindings));
      std::string intermediate = trim(mid.text);
      if (starts_with(intermediate, sa.intermediate_marker)) {
        intermediate = trim(intermediate.substr(sa.intermediate_marker.size()));
      }
      scratchpad += sa.followup_marker + " " + scan.followup + "\n" +
                    sa.intermediate_marker + " " + intermediate + "\n";
    }
    track.add(DecisionStep{"budget_exhausted",
                           "iteration budget reached without a final answer; "
                           "returning the last generation verbatim",
                           json{{"max_iteration", sa.max_iteration}}});
    for (auto it = track.steps.rbegin(); it != track.steps.rend(); ++it) {
      if (const auto* g = std::get_if<GenerationStep>(&*it)) {
        track.answer = g->output.text;
        break;
      }
    }
  }
};

class ActiveRagAlgorithm final : public RagAlgorithm {
 public:
  ActiveRagAlgorithm(AlgorithmContext ctx, AlgorithmConfig cfg)
      : RagAlgorithm("active_rag", "active_rag_draft", std::move(ctx),
                     std::move(cfg)) {}

 protected:
  void run(GenerationTrack& track, const std::string& query,
           std::map<std::string, std::string>& bindings) override {
    if (!ctx_.generator->supports_logprobs()) {
      throw CapabilityError(
          "active_rag needs per-token logprobs but generator '" +
          ctx_.generator->id() + "' cannot provide them");
    }
    GenParams params = config_.gen;
    if (params.logprobs_top_k < 1) params.logprobs_top_k = 1;
    const ActiveRagConfig& ar = config_.active_rag;
    const size_t budget = static_cast<size_t>(config_.gen.max_new_tokens);

    std::string answer;
    while (true) {
      if (track.generated_tokens() >= budget) {
        track.add(DecisionStep{"budget_exhausted",
                               "token budget reached",
                               json{{"budget", budget}}});
        break;
      }
      bindings["context"] = answer;
      GenerationOutput look = generate(track, "lookahead",
                                       assemble(main_template(), bindings),
                                       params);
      if (trim(look.text).empty()) {
        track.add(DecisionStep{"empty_lookahead", "look-ahead came back empty"});
        break;
      }
      std::string sentence = sentence_segment(look.text).front();
      TokenSlice slice = sentence_token_slice(look, sentence.size());
      std::vector<double> probs = token_probabilities(look);
      double min_prob = 1.0;
      for (size_t i = slice.begin; i < slice.end; ++i) {
        min_prob = std::min(min_prob, probs[i]);
      }
      bool trigger = min_prob < ar.filter_prob;

      std::string accepted;
      bool lookahead_consumed =
          look.finish == FinishReason::stop && sentence.size() == look.text.size();
      if (!trigger) {
        track.add(DecisionStep{"sentence_confident",
                               "all token probabilities at or above the filter",
                               json{{"min_prob", min_prob},
                                    {"filter_prob", ar.filter_prob},
                                    {"trigger", false}}});
        accepted = trim(sentence);
      } else {
        std::string implicit = masked_query(look, slice, ar.masked_prob);
        bool fallback = implicit.empty();
        if (fallback) implicit = query;
        track.add(DecisionStep{"sentence_uncertain",
                               "a token probability fell below the filter; "
                               "retrieving and regenerating",
                               json{{"min_prob", min_prob},
                                    {"filter_prob", ar.filter_prob},
                                    {"trigger", true},
                                    {"implicit_query", implicit},
                                    {"query_fallback", fallback}}});
        std::vector<Passage> passages =
            retrieve(track, implicit, config_.n_docs);
        std::map<std::string, std::string> regen_bindings = bindings;
        regen_bindings["passages"] = format_passages(passages);
        GenerationOutput regen =
            generate(track, "regenerate",
                     assemble(phase_template("regen"), regen_bindings), params);
        std::vector<std::string> regen_sentences = sentence_segment(regen.text);
        accepted = regen_sentences.empty() ? "" : trim(regen_sentences.front());
        if (accepted.empty()) {
          track.add(DecisionStep{"empty_regeneration",
                                 "regenerated sentence came back empty"});
          break;
        }
      }
      append_segment(answer, accepted);
      if (!trigger && lookahead_consumed) {
        track.add(DecisionStep{"lookahead_complete",
                               "accepted sentence consumed the whole "
                               "look-ahead and the generator stopped"});
        break;
      }
    }
    track.answer = answer;
  }
};

class SelfRagAlgorithm final : public RagAlgorithm {
 public:
  SelfRagAlgorithm(AlgorithmContext ctx, AlgorithmConfig cfg)
      : RagAlgorithm("self_rag", "self_rag_passage", std::move(ctx),
                     std::move(cfg)) {}

 protected:
  void run(GenerationTrack& track, const std::string& query,
           std::map<std::string, std::string>& bindings) override {
    const SelfRagConfig& sr = config_.self_rag;
    const std::vector<std::string> markers = sr.vocab.all_markers();

    if (sr.mode == "no") {
      bindings["context"] = "";
      GenerationOutput out =
          generate(track, "answer",
                   assemble(phase_template("continue"), bindings));
      track.answer = trim(strip_tokens(out.text, markers));
      return;
    }

    GenParams params = config_.gen;
    if (params.logprobs_top_k < 5) params.logprobs_top_k = 5;

    struct BeamItem {
      std::string answer;
      double score = 0.0;
      int64_t last_passage = -1;
      size_t birth = 0;
      bool last_segment_empty = false;
    };
    std::vector<BeamItem> beam{BeamItem{}};
    size_t birth_counter = 0;

    for (int depth = 1; depth <= sr.max_depth; ++depth) {
      if (sr.mode == "adaptive") {
        std::map<std::string, std::string> probe_bindings = bindings;
        probe_bindings["context"] = beam.front().answer;
        GenerationOutput probe =
            generate(track, "adaptive_probe",
                     assemble(phase_template("continue"), probe_bindings),
                     params);
        double p_yes = 0.5;
        bool degraded = probe.tokens.empty();
        if (!degraded) {
          if (sr.adaptive_raw) {
            p_yes = candidate_probability(probe, 0, {sr.vocab.retrieve_yes})[0];
          } else {
            p_yes = candidate_distribution(
                probe, 0, {sr.vocab.retrieve_yes, sr.vocab.retrieve_no})[0];
          }
        }
        bool do_retrieve = p_yes > sr.threshold;
        track.add(DecisionStep{"adaptive_trigger",
                               do_retrieve ? "retrieve at this boundary"
                                           : "continue without retrieval",
                               json{{"depth", depth},
                                    {"p_yes", p_yes},
                                    {"threshold", sr.threshold},
                                    {"retrieve", do_retrieve},
                                    {"degraded", degraded}}});
        if (!do_retrieve) {
          std::string segment = trim(strip_tokens(probe.text, markers));
          if (segment.empty()) {
            track.add(DecisionStep{"eos", "empty continuation; stopping"});
            break;
          }
          BeamItem leader = beam.front();
          append_segment(leader.answer, segment);
          leader.birth = birth_counter++;
          leader.last_segment_empty = false;
          beam.assign(1, std::move(leader));
          continue;
        }
      }

      std::vector<Passage> passages = retrieve(track, query, config_.n_docs);
      if (passages.empty()) {
        track.add(DecisionStep{"empty_retrieval",
                               "no passages at this boundary; stopping"});
        break;
      }

      std::vector<BeamItem> children;
      json candidates = json::array();
      for (const BeamItem& item : beam) {
        for (const Passage& passage : passages) {
          std::map<std::string, std::string> cand_bindings = bindings;
          cand_bindings["passages"] =
              format_passages(std::span<const Passage>(&passage, 1));
          cand_bindings["context"] = item.answer;
          GenerationOutput out =
              generate(track, "candidate",
                       assemble(main_template(), cand_bindings), params);
          SegmentJudgment judgment = judge_segment(out, sr.vocab);
          double score = segment_score(judgment, sr);

          BeamItem child = item;
          std::string segment = trim(strip_tokens(out.text, markers));
          append_segment(child.answer, segment);
          child.score = item.score + score;
          child.last_passage = passage.id;
          child.birth = birth_counter++;
          child.last_segment_empty = segment.empty();
          children.push_back(std::move(child));

          json degraded = json::array();
          if (judgment.degraded_rel) degraded.push_back("relevance");
          if (judgment.degraded_sup) degraded.push_back("support");
          if (judgment.degraded_use) degraded.push_back("utility");
          candidates.push_back(json{{"passage_id", passage.id},
                                    {"score", score},
                                    {"p_rel", judgment.p_rel},
                                    {"p_sup", judgment.p_sup},
                                    {"p_use", judgment.p_use},
                                    {"degraded", degraded}});
        }
      }
      std::sort(children.begin(), children.end(),
                [](const BeamItem& a, const BeamItem& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.last_passage != b.last_passage) {
                    return a.last_passage < b.last_passage;
                  }
                  return a.birth < b.birth;
                });
      if (children.size() > static_cast<size_t>(sr.beam_width)) {
        children.resize(static_cast<size_t>(sr.beam_width));
      }
      beam = std::move(children);

      json kept = json::array();
      for (const BeamItem& item : beam) {
        kept.push_back(json{{"passage_id", item.last_passage},
                            {"cumulative_score", item.score}});
      }
      track.add(DecisionStep{"beam",
                             "kept the best partial answers at this depth",
                             json{{"depth", depth},
                                  {"candidates", candidates},
                                  {"kept", kept}}});
      if (beam.front().last_segment_empty) {
        track.add(DecisionStep{"eos", "leader generated an empty segment; "
                                      "stopping"});
        break;
      }
    }
    track.answer = beam.front().answer;
  }
};

}  // namespace

void to_json(json& j, const IterRetgenConfig& c) {
  j = json{{"max_iteration", c.max_iteration}};
}

void to_json(json& j, const SelfAskConfig& c) {
  j = json{{"max_iteration", c.max_iteration},
           {"followup_marker", c.followup_marker},
           {"intermediate_marker", c.intermediate_marker},
           {"final_marker", c.final_marker}};
}

void to_json(json& j, const ActiveRagConfig& c) {
  j = json{{"filter_prob", c.filter_prob},
           {"masked_prob", c.masked_prob},
           {"query_formulation", c.query_formulation}};
}

void to_json(json& j, const ReflectionVocab& v) {
  j = json{{"retrieve_yes", v.retrieve_yes},
           {"retrieve_no", v.retrieve_no},
           {"rel_yes", v.rel_yes},
           {"rel_no", v.rel_no},
           {"sup_full", v.sup_full},
           {"sup_partial", v.sup_partial},
           {"sup_none", v.sup_none},
           {"utility", v.utility}};
}

void to_json(json& j, const SelfRagConfig& c) {
  j = json{{"beam_width", c.beam_width},
           {"max_depth", c.max_depth},
           {"w_rel", c.w_rel},
           {"w_sup", c.w_sup},
           {"w_use", c.w_use},
           {"threshold", c.threshold},
           {"mode", c.mode},
           {"adaptive_raw", c.adaptive_raw},
           {"vocab", c.vocab}};
}

void to_json(json& j, const AlgorithmConfig& c) {
  j = json{{"name", c.name},
           {"n_docs", c.n_docs},
           {"gen", c.gen},
           {"system_instruction", c.system_instruction},
           {"task_instruction", c.task_instruction},
           {"algorithm_instruction", c.algorithm_instruction},
           {"phase_instructions", c.phase_instructions},
           {"iter_retgen", c.iter_retgen},
           {"self_ask", c.self_ask},
           {"active_rag", c.active_rag},
           {"self_rag", c.self_rag}};
}

std::unique_ptr<RagAlgorithm> make_algorithm(AlgorithmConfig config,
                                             AlgorithmContext ctx) {
  config.validate();
  const std::string name = config.name;
  if (name == "direct") {
    return std::make_unique<DirectAlgorithm>(std::move(ctx), std::move(config));
  }
  if (name == "naive") {
    return std::make_unique<NaiveAlgorithm>(std::move(ctx), std::move(config));
  }
  if (name == "rrr") {
    return std::make_unique<RrrAlgorithm>(std::move(ctx), std::move(config));
  }
  if (name == "iter_retgen") {
    return std::make_unique<IterRetgenAlgorithm>(std::move(ctx),
                                                 std::move(config));
  }
  if (name == "self_ask") {
    return std::make_unique<SelfAskAlgorithm>(std::move(ctx), std::move(config));
  }
  if (name == "active_rag") {
    return std::make_unique<ActiveRagAlgorithm>(std::move(ctx),
                                                std::move(config));
  }
  return std::make_unique<SelfRagAlgorithm>(std::move(ctx), std::move(config));
}

}  // namespace ragbench

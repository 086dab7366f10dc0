#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/algorithms.hpp"
#include "ragbench/dataset.hpp"

namespace ragbench {

/// Digest of everything two algorithms must have in common to be compared
/// fairly: seed, generator identity + generation params, retriever config +
/// corpus fingerprint + retrieval depth, and the shared system/task
/// instruction names.
std::string shared_fingerprint(const AlgorithmConfig& config,
                               const AlgorithmContext& ctx);

/// Shared fingerprint plus the algorithm itself (name, resolved templates,
/// per-algorithm parameters).
std::string alignment_fingerprint(const RagAlgorithm& algorithm);

struct EvalOptions {
  std::filesystem::path output_dir = "runs";
  std::string benchmark = "custom";
  std::vector<std::string> metrics = {"accuracy", "f1"};
  size_t sample_size = 0;  // 0 = every item
  int parallelism = 1;     // bounded batch parallelism; 1 = sequential
  bool resume = true;      // reuse journaled records from a previous attempt
  bool save_tracks = false;
};

struct ItemRecord {
  std::string item_id;
  std::string question;
  std::string answer;
  bool errored = false;
  std::string error;
  std::map<std::string, double> scores;
  // Track summary.
  size_t retrievals = 0;
  size_t generations = 0;
  size_t decisions = 0;
  size_t generated_tokens = 0;
};

struct EvalReport {
  std::string run_id;
  std::string algorithm;
  std::string benchmark;
  std::string shared_fingerprint;
  std::string fingerprint;
  size_t item_count = 0;
  size_t errored = 0;
  std::vector<ItemRecord> records;                 // in item order
  std::map<std::string, double> aggregates;        // metric -> mean
  nlohmann::json effective_config;                 // echoed algorithm config
};

void to_json(nlohmann::json& j, const ItemRecord& r);
void from_json(const nlohmann::json& j, ItemRecord& r);
void to_json(nlohmann::json& j, const EvalReport& r);

/// Per-metric scores for one answer. Multiple-choice golds accept the choice
/// label and its text interchangeably. Unknown metric names raise
/// ConfigError.
std::map<std::string, double> score_item(const std::string& answer,
                                         const BenchmarkItem& item,
                                         const std::vector<std::string>& metrics);

/// Runs the algorithm over the (sequentially sampled) items, journaling one
/// JSONL record per item into output_dir as it goes; a rerun with the same
/// config resumes from the journal instead of re-running finished items.
/// Item-level backend failures mark the record errored and are excluded from
/// the aggregate means.
EvalReport evaluate_run(RagAlgorithm& algorithm,
                        const std::vector<BenchmarkItem>& items,
                        const EvalOptions& options);

struct BatchResult {
  std::vector<EvalReport> reports;
  std::string comparison_tsv;
  std::string comparison_text;
};

/// Runs several algorithms over the same items under the alignment
/// contract: any mismatch in the shared components (seed, generation
/// params, retrieval depth, system/task instructions, backends) is a hard
/// ConfigError before any inference starts.
BatchResult run_batch(
    const std::vector<std::unique_ptr<RagAlgorithm>>& algorithms,
    const std::vector<BenchmarkItem>& items, const EvalOptions& options);

/// "metric<TAB>value" rows in the options' metric order.
std::string aggregates_tsv(const EvalReport& report);
/// One row per report, one column per metric (TSV / aligned text).
std::string comparison_tsv(const std::vector<EvalReport>& reports,
                           const std::vector<std::string>& metrics);
std::string comparison_table(const std::vector<EvalReport>& reports,
                             const std::vector<std::string>& metrics);
/// Content digest over records + aggregates (reproducibility checks).
std::string report_digest(const EvalReport& report);
/// Writes <run_id>.report.json and <run_id>.aggregates.tsv under output_dir.
void write_report_files(const EvalReport& report, const EvalOptions& options);

/// Reflection/structural markers stripped from training-style data:
/// retrieval, relevance, support, utility markers plus paragraph/sequence
/// tags.
const std::vector<std::string>& default_special_tokens();

/// Removes every occurrence of each token from every string field in the
/// JSON tree (objects/arrays recursed), collapsing double spaces; returns
/// the number of removals. The token list must be non-empty.
size_t strip_special_tokens(nlohmann::json& value,
                            const std::vector<std::string>& tokens);

}  // namespace ragbench

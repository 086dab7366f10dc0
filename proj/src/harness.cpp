#include "ragbench/harness.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <set>

#include "ragbench/errors.hpp"
#include "ragbench/json_io.hpp"
#include "ragbench/metrics.hpp"
#include "ragbench/util.hpp"

namespace ragbench {

using nlohmann::json;

namespace {

const std::set<std::string>& known_metrics() {
  static const std::set<std::string> metrics = {"accuracy", "em",     "f1",
                                                "rouge_l",  "str_em", "str_hit"};
  return metrics;
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string shared_fingerprint(const AlgorithmConfig& config,
                               const AlgorithmContext& ctx) {
  json retriever = "none";
  if (ctx.retriever) {
    retriever = json{{"config_digest", ctx.retriever->config_digest()},
                     {"corpus_fingerprint", ctx.retriever->corpus_fingerprint()}};
  }
  json shared{{"seed", config.gen.seed},
              {"generator", ctx.generator ? ctx.generator->id() : "none"},
              {"gen", config.gen},
              {"n_docs", config.n_docs},
              {"retriever", retriever},
              {"system_instruction", config.system_instruction},
              {"task_instruction", config.task_instruction}};
  return fnv1a_hex(shared.dump());
}

std::string alignment_fingerprint(const RagAlgorithm& algorithm) {
  json full{{"shared", shared_fingerprint(algorithm.config(), algorithm.context())},
            {"algorithm", algorithm.name()},
            {"algorithm_instruction", algorithm.main_template()},
            {"config", algorithm.config()}};
  return fnv1a_hex(full.dump());
}

void to_json(json& j, const ItemRecord& r) {
  j = json{{"item_id", r.item_id},
           {"question", r.question},
           {"answer", r.answer},
           {"errored", r.errored},
           {"error", r.error},
           {"scores", r.scores},
           {"retrievals", r.retrievals},
           {"generations", r.generations},
           {"decisions", r.decisions},
           {"generated_tokens", r.generated_tokens}};
}

void from_json(const json& j, ItemRecord& r) {
  j.at("item_id").get_to(r.item_id);
  r.question = j.value("question", "");
  r.answer = j.value("answer", "");
  r.errored = j.value("errored", false);
  r.error = j.value("error", "");
  r.scores.clear();
  if (j.contains("scores")) j.at("scores").get_to(r.scores);
  r.retrievals = j.value("retrievals", size_t{0});
  r.generations = j.value("generations", size_t{0});
  r.decisions = j.value("decisions", size_t{0});
  r.generated_tokens = j.value("generated_tokens", size_t{0});
}

void to_json(json& j, const EvalReport& r) {
  j = json{{"run_id", r.run_id},
           {"algorithm", r.algorithm},
           {"benchmark", r.benchmark},
           {"shared_fingerprint", r.shared_fingerprint},
           {"fingerprint", r.fingerprint},
           {"item_count", r.item_count},
           {"errored", r.errored},
           {"records", r.records},
           {"aggregates", r.aggregates},
           {"effective_config", r.effective_config}};
}

std::map<std::string, double> score_item(const std::string& answer,
                                         const BenchmarkItem& item,
                                         const std::vector<std::string>& metrics) {
  std::vector<std::string> golds = item.golds;
  if (!item.choices.empty()) {
    for (const auto& gold : item.golds) {
      std::string norm = normalize_text(gold);
      for (const auto& [label, text] : item.choices) {
        if (normalize_text(label) == norm) golds.push_back(text);
        if (normalize_text(text) == norm) golds.push_back(label);
      }
    }
  }
  std::map<std::string, double> scores;
  for (const auto& metric : metrics) {
    if (metric == "accuracy") {
      scores[metric] = metric_accuracy(answer, golds);
    } else if (metric == "em") {
      scores[metric] = metric_em(answer, golds);
    } else if (metric == "f1") {
      scores[metric] = metric_f1(answer, golds);
    } else if (metric == "rouge_l") {
      double best = 0.0;
      for (const auto& gold : golds) {
        best = std::max(best, metric_rouge_l(answer, gold));
      }
      scores[metric] = best;
    } else if (metric == "str_em") {
      scores[metric] = metric_str_em(answer, item.answer_sets);
    } else if (metric == "str_hit") {
      scores[metric] = metric_str_hit(answer, item.answer_sets);
    } else {
      throw ConfigError("unknown metric '" + metric + "'");
    }
  }
  return scores;
}

EvalReport evaluate_run(RagAlgorithm& algorithm,
                        const std::vector<BenchmarkItem>& items,
                        const EvalOptions& options) {
  for (const auto& metric : options.metrics) {
    if (!known_metrics().count(metric)) {
      throw ConfigError("unknown metric '" + metric + "'");
    }
  }
  if (options.metrics.empty()) throw ConfigError("metric list must not be empty");
  if (options.parallelism < 1) throw ConfigError("parallelism must be >= 1");

  std::vector<BenchmarkItem> sampled =
      options.sample_size == 0 ? items
                               : sample_sequential(items, options.sample_size);

  EvalReport report;
  report.algorithm = algorithm.name();
  report.benchmark = options.benchmark;
  report.shared_fingerprint =
      shared_fingerprint(algorithm.config(), algorithm.context());
  report.fingerprint = alignment_fingerprint(algorithm);
  report.effective_config = algorithm.config();
  report.item_count = sampled.size();

  Digest run_digest;
  run_digest.update(report.fingerprint).sep();
  run_digest.update(options.benchmark).sep();
  run_digest.update_u64(sampled.size()).sep();
  for (const auto& metric : options.metrics) run_digest.update(metric).sep();
  report.run_id = "run-" + run_digest.hex();

  std::filesystem::create_directories(options.output_dir);
  std::filesystem::path journal_path =
      options.output_dir / (report.run_id + ".items.jsonl");

  // Resume: replay the journal's valid prefix; a malformed tail line is the
  // normal crash artifact and is dropped (the item just re-runs).
  std::map<std::string, ItemRecord> done;
  if (options.resume && std::filesystem::exists(journal_path)) {
    std::vector<std::string> valid_lines;
    {
      std::ifstream in(journal_path);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
          ItemRecord record = json::parse(line).get<ItemRecord>();
          done[record.item_id] = std::move(record);
          valid_lines.push_back(line);
        } catch (const std::exception&) {
          break;
        }
      }
    }
    std::ofstream rewrite(journal_path, std::ios::trunc);
    for (const auto& line : valid_lines) rewrite << line << "\n";
  } else if (std::filesystem::exists(journal_path) && !options.resume) {
    std::filesystem::remove(journal_path);
  }

  std::ofstream journal(journal_path, std::ios::app);
  if (!journal) {
    throw Error("cannot open journal " + journal_path.string());
  }
  std::ofstream tracks_out;
  if (options.save_tracks) {
    tracks_out.open(options.output_dir / (report.run_id + ".tracks.jsonl"),
                    done.empty() ? std::ios::trunc : std::ios::app);
  }

  auto run_item = [&](const BenchmarkItem& item) {
    ItemRecord record;
    record.item_id = item.id;
    record.question = item.question;
    json track_json;
    try {
      std::map<std::string, std::string> extra{{"choices", format_choices(item)}};
      GenerationTrack track = algorithm.infer(item.question, extra);
      record.answer = track.answer;
      record.retrievals = track.retrieval_count();
      record.generations = track.generation_count();
      record.decisions = track.decision_count();
      record.generated_tokens = track.generated_tokens();
      record.scores = score_item(record.answer, item, options.metrics);
      if (options.save_tracks) track_json = track;
    } catch (const std::exception& e) {
      record.errored = true;
      record.error = e.what();
      record.scores.clear();
    }
    return std::make_pair(std::move(record), std::move(track_json));
  };

  const size_t batch = static_cast<size_t>(options.parallelism);
  for (size_t start = 0; start < sampled.size(); start += batch) {
    size_t end = std::min(sampled.size(), start + batch);
    std::vector<std::future<std::pair<ItemRecord, json>>> futures(end - start);
    for (size_t i = start; i < end; ++i) {
      if (done.count(sampled[i].id)) continue;
      futures[i - start] = std::async(
          batch > 1 ? std::launch::async : std::launch::deferred, run_item,
          std::cref(sampled[i]));
    }
    for (size_t i = start; i < end; ++i) {
      auto it = done.find(sampled[i].id);
      if (it != done.end()) {
        report.records.push_back(it->second);
        continue;
      }
      auto [record, track_json] = futures[i - start].get();
      journal << json(record).dump() << "\n";
      journal.flush();
      if (options.save_tracks && !track_json.is_null()) {
        tracks_out << json{{"item_id", record.item_id}, {"track", track_json}}
                          .dump()
                   << "\n";
        tracks_out.flush();
      }
      report.records.push_back(std::move(record));
    }
  }

  for (const auto& metric : options.metrics) {
    double sum = 0.0;
    size_t n = 0;
    for (const auto& record : report.records) {
      if (record.errored) continue;
      auto it = record.scores.find(metric);
      if (it == record.scores.end()) continue;
      sum += it->second;
      ++n;
    }
    report.aggregates[metric] = n > 0 ? sum / static_cast<double>(n) : 0.0;
  }
  for (const auto& record : report.records) report.errored += record.errored;
  return report;
}

BatchResult run_batch(
    const std::vector<std::unique_ptr<RagAlgorithm>>& algorithms,
    const std::vector<BenchmarkItem>& items, const EvalOptions& options) {
  if (algorithms.empty()) {
    throw ConfigError("comparison batch needs at least one algorithm");
  }
  const RagAlgorithm& first = *algorithms.front();
  for (size_t i = 1; i < algorithms.size(); ++i) {
    const RagAlgorithm& other = *algorithms[i];
    auto mismatch = [&](const std::string& field) {
      throw ConfigError("alignment violation: '" + field + "' differs between " +
                        first.name() + " and " + other.name());
    };
    if (json(first.config().gen) != json(other.config().gen)) {
      mismatch("gen params");
    }
    if (first.config().n_docs != other.config().n_docs) mismatch("n_docs");
    if (first.config().system_instruction != other.config().system_instruction) {
      mismatch("system_instruction");
    }
    if (first.config().task_instruction != other.config().task_instruction) {
      mismatch("task_instruction");
    }
    if (first.context().generator->id() != other.context().generator->id()) {
      mismatch("generator");
    }
    const auto& r0 = first.context().retriever;
    const auto& r1 = other.context().retriever;
    if (static_cast<bool>(r0) != static_cast<bool>(r1)) mismatch("retriever");
    if (r0 && r1 &&
        (r0->config_digest() != r1->config_digest() ||
         r0->corpus_fingerprint() != r1->corpus_fingerprint())) {
      mismatch("retriever");
    }
  }

  BatchResult result;
  for (const auto& algorithm : algorithms) {
    result.reports.push_back(evaluate_run(*algorithm, items, options));
  }
  result.comparison_tsv = comparison_tsv(result.reports, options.metrics);
  result.comparison_text = comparison_table(result.reports, options.metrics);
  return result;
}

std::string aggregates_tsv(const EvalReport& report) {
  std::string out = "metric\tvalue\n";
  for (const auto& [metric, value] : report.aggregates) {
    out += metric + "\t" + format_score(value) + "\n";
  }
  return out;
}

std::string comparison_tsv(const std::vector<EvalReport>& reports,
                           const std::vector<std::string>& metrics) {
  std::string out = "algorithm\titems\terrors";
  for (const auto& metric : metrics) out += "\t" + metric;
  out += "\n";
  for (const auto& report : reports) {
    out += report.algorithm + "\t" + std::to_string(report.item_count) + "\t" +
           std::to_string(report.errored);
    for (const auto& metric : metrics) {
      auto it = report.aggregates.find(metric);
      out += "\t" + (it != report.aggregates.end() ? format_score(it->second)
                                                   : std::string("-"));
    }
    out += "\n";
  }
  return out;
}

std::string comparison_table(const std::vector<EvalReport>& reports,
                             const std::vector<std::string>& metrics) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"algorithm", "items", "errors"};
  header.insert(header.end(), metrics.begin(), metrics.end());
  rows.push_back(header);
  for (const auto& report : reports) {
    std::vector<std::string> row = {report.algorithm,
                                    std::to_string(report.item_count),
                                    std::to_string(report.errored)};
    for (const auto& metric : metrics) {
      auto it = report.aggregates.find(metric);
      row.push_back(it != report.aggregates.end() ? format_score(it->second)
                                                  : "-");
    }
    rows.push_back(row);
  }
  std::vector<size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += "  ";
      out += row[c];
      if (c + 1 < row.size()) out += std::string(widths[c] - row[c].size(), ' ');
    }
    out += "\n";
  }
  return out;
}

std::string report_digest(const EvalReport& report) {
  Digest digest;
  for (const auto& record : report.records) {
    digest.update(json(record).dump()).sep();
  }
  digest.update(json(report.aggregates).dump());
  return digest.hex();
}

void write_report_files(const EvalReport& report, const EvalOptions& options) {
  std::filesystem::create_directories(options.output_dir);
  {
    std::ofstream out(options.output_dir / (report.run_id + ".report.json"),
                      std::ios::trunc);
    out << json(report).dump(2) << "\n";
  }
  {
    std::ofstream out(options.output_dir / (report.run_id + ".aggregates.tsv"),
                      std::ios::trunc);
    out << aggregates_tsv(report);
  }
}

const std::vector<std::string>& default_special_tokens() {
  static const std::vector<std::string> tokens = {
      "[Retrieval]",
      "[No Retrieval]",
      "[Continue to Use Evidence]",
      "[Relevant]",
      "[Irrelevant]",
      "[Fully supported]",
      "[Partially supported]",
      "[No support / Contradictory]",
      "[Utility:1]",
      "[Utility:2]",
      "[Utility:3]",
      "[Utility:4]",
      "[Utility:5]",
      "<paragraph>",
      "</paragraph>",
      "<s>",
      "</s>"};
  return tokens;
}

size_t strip_special_tokens(json& value, const std::vector<std::string>& tokens) {
  if (tokens.empty()) {
    throw ConfigError("special-token list must not be empty");
  }
  if (value.is_string()) {
    size_t removed = 0;
    value = strip_tokens(value.get<std::string>(), tokens, &removed);
    return removed;
  }
  size_t removed = 0;
  if (value.is_array()) {
    for (auto& element : value) removed += strip_special_tokens(element, tokens);
  } else if (value.is_object()) {
    for (auto& [key, element] : value.items()) {
      removed += strip_special_tokens(element, tokens);
    }
  }
  return removed;
}

}  // namespace ragbench

// ragbench command line: evaluate strategies, chat with one interactively,
// build/serve retrieval indexes, and clean benchmark data.

#include <atomic>
#include <csignal>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ragbench/config.hpp"
#include "ragbench/corpus.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/harness.hpp"
#include "ragbench/index.hpp"
#include "ragbench/retrieval_service.hpp"
#include "ragbench/track.hpp"

namespace {

using nlohmann::json;
using namespace ragbench;

std::atomic<int> g_signal{0};

void handle_signal(int sig) { g_signal.store(sig); }

RunConfig load_cli_config(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  if (config_path.empty()) return run_config_from_overrides(overrides);
  return load_run_config(config_path, overrides);
}

EvalOptions eval_options_from(const RunConfig& cfg) {
  EvalOptions opts;
  opts.output_dir = cfg.output_dir;
  opts.benchmark = cfg.benchmark.empty() ? "custom" : cfg.benchmark;
  opts.metrics = cfg.metrics;
  opts.sample_size = cfg.sample_size;
  opts.parallelism = cfg.parallelism;
  opts.resume = cfg.resume;
  opts.save_tracks = cfg.save_tracks;
  return opts;
}

std::vector<BenchmarkItem> load_items(const RunConfig& cfg) {
  if (cfg.dataset.empty()) {
    throw ConfigError("no dataset configured (set `dataset:` or --set dataset=...)");
  }
  return load_dataset(cfg.dataset, cfg.keymap);
}

int cmd_eval(const std::string& config_path,
             const std::vector<std::string>& overrides) {
  RunConfig cfg = load_cli_config(config_path, overrides);
  const std::vector<BenchmarkItem> items = load_items(cfg);
  AlgorithmContext ctx = build_context(cfg);
  const EvalOptions opts = eval_options_from(cfg);

  if (cfg.algorithms.size() == 1) {
    auto algorithm = make_algorithm(cfg.algorithm, ctx);
    EvalReport report = evaluate_run(*algorithm, items, opts);
    report.effective_config = cfg.effective;
    write_report_files(report, opts);
    std::cout << "run " << report.run_id << "  algorithm=" << report.algorithm
              << "  benchmark=" << report.benchmark << "\n"
              << "items: " << report.item_count
              << "  errors: " << report.errored << "\n"
              << aggregates_tsv(report)
              << "report: "
              << (opts.output_dir / (report.run_id + ".report.json")).string()
              << "\n";
    return 0;
  }

  std::vector<std::unique_ptr<RagAlgorithm>> algorithms;
  for (const auto& name : cfg.algorithms) {
    AlgorithmConfig ac = cfg.algorithm;
    ac.name = name;
    algorithms.push_back(make_algorithm(std::move(ac), ctx));
  }
  BatchResult batch = run_batch(algorithms, items, opts);
  for (auto& report : batch.reports) {
    report.effective_config = cfg.effective;
    write_report_files(report, opts);
  }
  std::filesystem::create_directories(opts.output_dir);
  const auto tsv_path = opts.output_dir / "comparison.tsv";
  const auto txt_path = opts.output_dir / "comparison.txt";
  std::ofstream(tsv_path) << batch.comparison_tsv;
  std::ofstream(txt_path) << batch.comparison_text;
  std::cout << batch.comparison_text << "comparison: " << tsv_path.string()
            << "\n";
  return 0;
}

int cmd_interact(const std::string& config_path,
                 const std::vector<std::string>& overrides) {
  RunConfig cfg = load_cli_config(config_path, overrides);
  AlgorithmContext ctx = build_context(cfg);
  auto algorithm = make_algorithm(cfg.algorithm, ctx);

  std::cout << "algorithm '" << algorithm->name() << "', generator '"
            << ctx.generator->id() << "', retriever "
            << (ctx.retriever ? "'" + ctx.retriever->config_digest() + "'"
                              : "(none)")
            << "\n"
            << "type a query; :track json | :track text switches the trace "
               "format; :quit exits\n";

  bool json_tracks = false;
  std::string line;
  while (true) {
    std::cout << "query> " << std::flush;
    if (!std::getline(std::cin, line)) {
      std::cout << "\n";
      return 0;
    }
    if (line.empty()) continue;
    if (line == ":quit" || line == ":q") return 0;
    if (line == ":track json") {
      json_tracks = true;
      std::cout << "trace format: json\n";
      continue;
    }
    if (line == ":track text") {
      json_tracks = false;
      std::cout << "trace format: text\n";
      continue;
    }
    try {
      const GenerationTrack track = algorithm->infer(line);
      if (json_tracks) {
        std::cout << json(track).dump(2) << "\n";
      } else {
        std::cout << format_track(track);
      }
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
}

int cmd_build_index(const std::string& corpus_path, const std::string& format,
                    int chunk_words, const std::string& output, double k1,
                    double b) {
  const CorpusFormat fmt = parse_corpus_format(format);
  const Corpus corpus = ingest_corpus(corpus_path, fmt, chunk_words);
  const InvertedIndex index = InvertedIndex::build(corpus, Bm25Params{k1, b});
  index.save_file(output);
  const IndexStats stats = index.stats();
  std::cout << "ingested " << corpus.passages.size() << " passages from "
            << corpus_path << " (windows of " << chunk_words << " words)\n"
            << "index: " << output << "\n"
            << "passages: " << stats.passage_count
            << "  terms: " << stats.term_count
            << "  avg_doc_len: " << stats.avg_doc_length << "\n"
            << "corpus_fingerprint: " << index.fingerprint() << "\n"
            << "config_digest: " << index.config_digest() << "\n";
  return 0;
}

int cmd_serve_retriever(const std::string& index_path, const std::string& host,
                        int port, const std::string& cache_path,
                        std::size_t cache_max_entries) {
  auto index =
      std::make_shared<InvertedIndex>(InvertedIndex::load_file(index_path));
  RetrievalServer server(index, host, port, cache_path, cache_max_entries);
  if (!server.cache().load_warning().empty()) {
    std::cerr << "warning: " << server.cache().load_warning() << "\n";
  }
  std::cout << "serving " << index->passages().size() << " passages on "
            << server.base_url() << " (corpus " << index->fingerprint()
            << ")\n"
            << "press Ctrl-C to stop\n"
            << std::flush;

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (g_signal.load() == 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  std::cout << "shutting down (signal " << g_signal.load() << ")\n";
  server.shutdown();
  return 0;
}

int cmd_prep_data(const std::string& input, const std::string& output,
                  const std::vector<std::string>& extra_tokens) {
  const std::vector<std::string>& tokens =
      extra_tokens.empty() ? default_special_tokens() : extra_tokens;

  std::ifstream in(input);
  if (!in) throw ConfigError("cannot open input file: " + input);
  std::ofstream out(output);
  if (!out) throw ConfigError("cannot open output file: " + output);

  std::size_t removed = 0;
  std::size_t records = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError(input + ":" + std::to_string(line_no) +
                        ": invalid JSON: " + e.what());
    }
    removed += strip_special_tokens(record, tokens);
    out << record.dump() << "\n";
    ++records;
  }
  std::cout << "stripped " << removed << " special-token occurrences across "
            << records << " records -> " << output << "\n";
  return 0;
}

int guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ragbench: run, trace, and fairly compare retrieval-augmented "
      "inference strategies"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto add_config_opts = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "YAML run configuration");
    sub->add_option("--set", overrides,
                    "override a config value, e.g. --set self_rag.mode=always");
  };

  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate one or more algorithms over a benchmark");
  add_config_opts(eval);

  CLI::App* interact = app.add_subcommand(
      "interact", "answer queries interactively, printing the full trace");
  add_config_opts(interact);

  CLI::App* build_index =
      app.add_subcommand("build-index", "ingest a corpus and save an index");
  std::string corpus_path, corpus_format = "dpr-tsv", index_out;
  int chunk_words = 100;
  double k1 = 0.9, b = 0.4;
  build_index->add_option("--corpus", corpus_path, "corpus source file")
      ->required();
  build_index->add_option("--format", corpus_format,
                          "corpus format: dpr-tsv | jsonl");
  build_index->add_option("--chunk-words", chunk_words,
                          "window size in words");
  build_index->add_option("-o,--output", index_out, "index output path")
      ->required();
  build_index->add_option("--k1", k1, "BM25 k1");
  build_index->add_option("--b", b, "BM25 b");

  CLI::App* serve = app.add_subcommand(
      "serve-retriever", "serve a saved index over HTTP with a shared cache");
  std::string serve_index, host = "127.0.0.1", cache_path;
  int port = 8321;
  std::size_t cache_max = 0;
  serve->add_option("--index", serve_index, "saved index path")->required();
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port");
  serve->add_option("--cache", cache_path, "cache journal path");
  serve->add_option("--cache-max-entries", cache_max,
                    "cache capacity (0 = unbounded)");

  CLI::App* prep = app.add_subcommand(
      "prep-data", "strip reflection/special tokens from a JSONL file");
  std::string prep_in, prep_out;
  std::vector<std::string> prep_tokens;
  prep->add_option("-i,--input", prep_in, "input JSONL")->required();
  prep->add_option("-o,--output", prep_out, "output JSONL")->required();
  prep->add_option("--token", prep_tokens,
                   "token to strip (repeatable; default: built-in list)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (eval->parsed()) {
    return guarded([&] { return cmd_eval(config_path, overrides); });
  }
  if (interact->parsed()) {
    return guarded([&] { return cmd_interact(config_path, overrides); });
  }
  if (build_index->parsed()) {
    return guarded([&] {
      return cmd_build_index(corpus_path, corpus_format, chunk_words,
                             index_out, k1, b);
    });
  }
  if (serve->parsed()) {
    return guarded([&] {
      return cmd_serve_retriever(serve_index, host, port, cache_path,
                                 cache_max);
    });
  }
  if (prep->parsed()) {
    return guarded([&] { return cmd_prep_data(prep_in, prep_out, prep_tokens); });
  }
  return 2;
}

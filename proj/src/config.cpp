#include "ragbench/config.hpp"

#include <regex>
#include <set>

#include "ragbench/cache.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/index.hpp"
#include "ragbench/json_io.hpp"
#include "ragbench/openai_client.hpp"
#include "ragbench/retrieval_client.hpp"
#include "ragbench/retriever.hpp"
#include "ragbench/scripted_generator.hpp"

namespace ragbench {

using nlohmann::json;

namespace {

json yaml_scalar(const YAML::Node& node) {
  const std::string& s = node.Scalar();
  // Tag "!" marks a quoted scalar: always a string, never coerced.
  if (node.Tag() != "!") {
    if (s == "true" || s == "True") return true;
    if (s == "false" || s == "False") return false;
    if (s == "null" || s == "~" || s.empty()) return nullptr;
    static const std::regex int_re(R"(^[+-]?\d+$)");
    if (std::regex_match(s, int_re)) {
      try {
        return static_cast<std::int64_t>(std::stoll(s));
      } catch (const std::exception&) {
        // out of range: fall through to string
      }
    }
    static const std::regex num_re(
        R"(^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$)");
    if (std::regex_match(s, num_re) &&
        s.find_first_of(".eE") != std::string::npos) {
      try {
        return std::stod(s);
      } catch (const std::exception&) {
      }
    }
  }
  return s;
}

json parse_override_value(const std::string& value) {
  if (!value.empty() &&
      (value[0] == '[' || value[0] == '{' || value[0] == '"')) {
    try {
      return json::parse(value);
    } catch (const json::exception& e) {
      throw ConfigError("override value " + value +
                        " is not valid JSON: " + e.what());
    }
  }
  if (value == "true" || value == "True") return true;
  if (value == "false" || value == "False") return false;
  if (value == "null" || value == "~") return nullptr;
  static const std::regex int_re(R"(^[+-]?\d+$)");
  if (std::regex_match(value, int_re)) {
    try {
      return static_cast<std::int64_t>(std::stoll(value));
    } catch (const std::exception&) {
    }
  }
  static const std::regex num_re(
      R"(^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$)");
  if (std::regex_match(value, num_re) &&
      value.find_first_of(".eE") != std::string::npos) {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
    }
  }
  return value;
}

void validate_keys(const json& obj, const std::set<std::string>& allowed,
                   const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

std::int64_t as_int(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) {
    throw ConfigError(ctx + " must be an integer, got " + v.dump());
  }
  return v.get<std::int64_t>();
}

double as_double(const json& v, const std::string& ctx) {
  if (!v.is_number()) {
    throw ConfigError(ctx + " must be a number, got " + v.dump());
  }
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& ctx) {
  if (!v.is_boolean()) {
    throw ConfigError(ctx + " must be true or false, got " + v.dump());
  }
  return v.get<bool>();
}

std::string as_str(const json& v, const std::string& ctx) {
  if (!v.is_string()) {
    throw ConfigError(ctx + " must be a string, got " + v.dump());
  }
  return v.get<std::string>();
}

std::vector<std::string> as_str_list(const json& v, const std::string& ctx) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) {
    throw ConfigError(ctx + " must be a string or list of strings, got " +
                      v.dump());
  }
  std::vector<std::string> out;
  for (const auto& item : v) out.push_back(as_str(item, ctx + " entry"));
  return out;
}

void merge_gen(const json& j, GenParams& g) {
  validate_keys(j,
                {"max_new_tokens", "temperature", "seed", "logprobs_top_k",
                 "stop"},
                "gen");
  if (j.contains("max_new_tokens"))
    g.max_new_tokens = static_cast<int>(as_int(j["max_new_tokens"],
                                               "gen.max_new_tokens"));
  if (j.contains("temperature"))
    g.temperature = as_double(j["temperature"], "gen.temperature");
  if (j.contains("seed"))
    g.seed = static_cast<std::uint64_t>(as_int(j["seed"], "gen.seed"));
  if (j.contains("logprobs_top_k"))
    g.logprobs_top_k = static_cast<int>(as_int(j["logprobs_top_k"],
                                               "gen.logprobs_top_k"));
  if (j.contains("stop")) g.stop = as_str_list(j["stop"], "gen.stop");
}

void merge_iter_retgen(const json& j, IterRetgenConfig& c) {
  validate_keys(j, {"max_iteration"}, "iter_retgen");
  if (j.contains("max_iteration"))
    c.max_iteration = static_cast<int>(as_int(j["max_iteration"],
                                              "iter_retgen.max_iteration"));
}

void merge_self_ask(const json& j, SelfAskConfig& c) {
  validate_keys(j,
                {"max_iteration", "followup_marker", "intermediate_marker",
                 "final_marker"},
                "self_ask");
  if (j.contains("max_iteration"))
    c.max_iteration = static_cast<int>(as_int(j["max_iteration"],
                                              "self_ask.max_iteration"));
  if (j.contains("followup_marker"))
    c.followup_marker = as_str(j["followup_marker"], "self_ask.followup_marker");
  if (j.contains("intermediate_marker"))
    c.intermediate_marker =
        as_str(j["intermediate_marker"], "self_ask.intermediate_marker");
  if (j.contains("final_marker"))
    c.final_marker = as_str(j["final_marker"], "self_ask.final_marker");
}

void merge_active_rag(const json& j, ActiveRagConfig& c) {
  validate_keys(j, {"filter_prob", "masked_prob", "query_formulation"},
                "active_rag");
  if (j.contains("filter_prob"))
    c.filter_prob = as_double(j["filter_prob"], "active_rag.filter_prob");
  if (j.contains("masked_prob"))
    c.masked_prob = as_double(j["masked_prob"], "active_rag.masked_prob");
  if (j.contains("query_formulation"))
    c.query_formulation =
        as_str(j["query_formulation"], "active_rag.query_formulation");
}

void merge_self_rag(const json& j, SelfRagConfig& c) {
  validate_keys(j,
                {"beam_width", "max_depth", "w_rel", "w_sup", "w_use",
                 "threshold", "mode", "adaptive_raw"},
                "self_rag");
  if (j.contains("beam_width"))
    c.beam_width = static_cast<int>(as_int(j["beam_width"],
                                           "self_rag.beam_width"));
  if (j.contains("max_depth"))
    c.max_depth = static_cast<int>(as_int(j["max_depth"],
                                          "self_rag.max_depth"));
  if (j.contains("w_rel")) c.w_rel = as_double(j["w_rel"], "self_rag.w_rel");
  if (j.contains("w_sup")) c.w_sup = as_double(j["w_sup"], "self_rag.w_sup");
  if (j.contains("w_use")) c.w_use = as_double(j["w_use"], "self_rag.w_use");
  if (j.contains("threshold"))
    c.threshold = as_double(j["threshold"], "self_rag.threshold");
  if (j.contains("mode")) c.mode = as_str(j["mode"], "self_rag.mode");
  if (j.contains("adaptive_raw"))
    c.adaptive_raw = as_bool(j["adaptive_raw"], "self_rag.adaptive_raw");
}

void merge_generator(const json& j, GeneratorConfig& g) {
  validate_keys(j,
                {"backend", "script", "base_url", "model", "api_key_env",
                 "completions_path"},
                "generator");
  if (j.contains("backend")) g.backend = as_str(j["backend"], "generator.backend");
  if (j.contains("script")) g.script = as_str(j["script"], "generator.script");
  if (j.contains("base_url"))
    g.base_url = as_str(j["base_url"], "generator.base_url");
  if (j.contains("model")) g.model = as_str(j["model"], "generator.model");
  if (j.contains("api_key_env"))
    g.api_key_env = as_str(j["api_key_env"], "generator.api_key_env");
  if (j.contains("completions_path"))
    g.completions_path =
        as_str(j["completions_path"], "generator.completions_path");
  if (g.backend != "scripted" && g.backend != "openai") {
    throw ConfigError("unknown generator backend '" + g.backend +
                      "' (known: scripted, openai)");
  }
}

void merge_retriever(const json& j, RetrieverSetup& r) {
  validate_keys(j, {"mode", "index", "cache", "cache_max_entries", "base_url"},
                "retriever");
  if (j.contains("mode")) r.mode = as_str(j["mode"], "retriever.mode");
  if (j.contains("index")) r.index = as_str(j["index"], "retriever.index");
  if (j.contains("cache")) r.cache = as_str(j["cache"], "retriever.cache");
  if (j.contains("cache_max_entries"))
    r.cache_max_entries = static_cast<std::size_t>(
        as_int(j["cache_max_entries"], "retriever.cache_max_entries"));
  if (j.contains("base_url"))
    r.base_url = as_str(j["base_url"], "retriever.base_url");
  if (r.mode != "none" && r.mode != "local" && r.mode != "http") {
    throw ConfigError("unknown retriever mode '" + r.mode +
                      "' (known: none, local, http)");
  }
}

void merge_keymap(const json& j, KeyMap& k) {
  validate_keys(j,
                {"question_key", "answers_key", "choices_key", "id_key",
                 "answer_sets_key"},
                "keymap");
  if (j.contains("question_key"))
    k.question_key = as_str(j["question_key"], "keymap.question_key");
  if (j.contains("answers_key"))
    k.answers_key = as_str(j["answers_key"], "keymap.answers_key");
  if (j.contains("choices_key"))
    k.choices_key = as_str(j["choices_key"], "keymap.choices_key");
  if (j.contains("id_key")) k.id_key = as_str(j["id_key"], "keymap.id_key");
  if (j.contains("answer_sets_key"))
    k.answer_sets_key = as_str(j["answer_sets_key"], "keymap.answer_sets_key");
}

const std::set<std::string>& known_metrics() {
  static const std::set<std::string> names{"accuracy", "em",      "f1",
                                           "rouge_l",  "str_em", "str_hit"};
  return names;
}

json keymap_to_json(const KeyMap& k) {
  return json{{"question_key", k.question_key},
              {"answers_key", k.answers_key},
              {"choices_key", k.choices_key},
              {"id_key", k.id_key},
              {"answer_sets_key", k.answer_sets_key}};
}

json generator_to_json(const GeneratorConfig& g) {
  return json{{"backend", g.backend},
              {"script", g.script},
              {"base_url", g.base_url},
              {"model", g.model},
              {"api_key_env", g.api_key_env},
              {"completions_path", g.completions_path}};
}

json retriever_to_json(const RetrieverSetup& r) {
  return json{{"mode", r.mode},
              {"index", r.index},
              {"cache", r.cache},
              {"cache_max_entries", r.cache_max_entries},
              {"base_url", r.base_url}};
}

}  // namespace

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return yaml_scalar(node);
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) {
        obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      }
      return obj;
    }
  }
  return nullptr;
}

json yaml_file_to_json(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  try {
    return yaml_to_json(YAML::LoadFile(path.string()));
  } catch (const YAML::Exception& e) {
    throw ConfigError("failed to parse YAML file '" + path.string() +
                      "': " + e.what());
  }
}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like path.key=value, got '" +
                      assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty()) {
      throw ConfigError("override path '" + path + "' has an empty segment");
    }
    parts.push_back(part);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }

  json* node = &tree;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& child = (*node)[parts[i]];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) {
      throw ConfigError("override path '" + path +
                        "' descends into non-mapping key '" + parts[i] + "'");
    }
    node = &child;
  }
  (*node)[parts.back()] = parse_override_value(value);
}

RunConfig run_config_from_tree(const json& tree) {
  if (!tree.is_object()) {
    throw ConfigError("config root must be a mapping");
  }
  static const std::set<std::string> top_keys{
      "seed",          "algorithm",        "n_docs",
      "gen",           "system_instruction", "task_instruction",
      "algorithm_instruction", "phase_instructions", "iter_retgen",
      "self_ask",      "active_rag",       "self_rag",
      "generator",     "retriever",        "benchmark",
      "dataset",       "keymap",           "instructions_file",
      "presets_file",  "metrics",          "sample_size",
      "output_dir",    "parallelism",      "resume",
      "save_tracks"};
  validate_keys(tree, top_keys, "config");

  RunConfig cfg;

  if (tree.contains("presets_file"))
    cfg.presets_file = as_str(tree["presets_file"], "presets_file");
  if (tree.contains("benchmark"))
    cfg.benchmark = as_str(tree["benchmark"], "benchmark");

  // Benchmark preset first so explicit keys below can override its values.
  if (!cfg.benchmark.empty()) {
    std::map<std::string, BenchmarkPreset> extra;
    if (!cfg.presets_file.empty()) extra = load_presets_file(cfg.presets_file);
    const BenchmarkPreset preset = resolve_preset(cfg.benchmark, extra);
    cfg.algorithm.n_docs = preset.n_docs;
    cfg.algorithm.gen.max_new_tokens = preset.max_length;
    cfg.metrics = preset.metrics;
    cfg.keymap = preset.keymap;
  }

  if (tree.contains("instructions_file"))
    cfg.instructions_file = as_str(tree["instructions_file"],
                                   "instructions_file");

  // The benchmark name doubles as the task-instruction name when the
  // instruction set defines one and the config does not say otherwise.
  if (!cfg.benchmark.empty() && !tree.contains("task_instruction")) {
    const auto store = build_instructions(cfg.instructions_file);
    if (store->contains("task", cfg.benchmark)) {
      cfg.algorithm.task_instruction = cfg.benchmark;
    }
  }

  if (tree.contains("algorithm")) {
    cfg.algorithms = as_str_list(tree["algorithm"], "algorithm");
    if (cfg.algorithms.empty()) {
      throw ConfigError("algorithm list must not be empty");
    }
  }
  cfg.algorithm.name = cfg.algorithms.front();

  if (tree.contains("n_docs"))
    cfg.algorithm.n_docs = static_cast<int>(as_int(tree["n_docs"], "n_docs"));
  if (tree.contains("gen")) merge_gen(tree["gen"], cfg.algorithm.gen);
  if (tree.contains("system_instruction"))
    cfg.algorithm.system_instruction =
        as_str(tree["system_instruction"], "system_instruction");
  if (tree.contains("task_instruction"))
    cfg.algorithm.task_instruction =
        as_str(tree["task_instruction"], "task_instruction");
  if (tree.contains("algorithm_instruction"))
    cfg.algorithm.algorithm_instruction =
        as_str(tree["algorithm_instruction"], "algorithm_instruction");
  if (tree.contains("phase_instructions")) {
    const json& pi = tree["phase_instructions"];
    if (!pi.is_object()) {
      throw ConfigError("phase_instructions must be a mapping of phase -> "
                        "instruction name");
    }
    for (const auto& [phase, name] : pi.items()) {
      cfg.algorithm.phase_instructions[phase] =
          as_str(name, "phase_instructions." + phase);
    }
  }
  if (tree.contains("iter_retgen"))
    merge_iter_retgen(tree["iter_retgen"], cfg.algorithm.iter_retgen);
  if (tree.contains("self_ask"))
    merge_self_ask(tree["self_ask"], cfg.algorithm.self_ask);
  if (tree.contains("active_rag"))
    merge_active_rag(tree["active_rag"], cfg.algorithm.active_rag);
  if (tree.contains("self_rag"))
    merge_self_rag(tree["self_rag"], cfg.algorithm.self_rag);

  // Top-level seed is shorthand for gen.seed.
  if (tree.contains("seed") &&
      !(tree.contains("gen") && tree["gen"].is_object() &&
        tree["gen"].contains("seed"))) {
    cfg.algorithm.gen.seed = static_cast<std::uint64_t>(
        as_int(tree["seed"], "seed"));
  }

  if (tree.contains("generator")) merge_generator(tree["generator"], cfg.generator);
  if (tree.contains("retriever")) merge_retriever(tree["retriever"], cfg.retriever);
  if (tree.contains("dataset")) cfg.dataset = as_str(tree["dataset"], "dataset");
  if (tree.contains("keymap")) merge_keymap(tree["keymap"], cfg.keymap);
  if (tree.contains("metrics")) cfg.metrics = as_str_list(tree["metrics"], "metrics");
  if (tree.contains("sample_size"))
    cfg.sample_size = static_cast<std::size_t>(
        as_int(tree["sample_size"], "sample_size"));
  if (tree.contains("output_dir"))
    cfg.output_dir = as_str(tree["output_dir"], "output_dir");
  if (tree.contains("parallelism"))
    cfg.parallelism = static_cast<int>(as_int(tree["parallelism"], "parallelism"));
  if (tree.contains("resume")) cfg.resume = as_bool(tree["resume"], "resume");
  if (tree.contains("save_tracks"))
    cfg.save_tracks = as_bool(tree["save_tracks"], "save_tracks");

  // Validate the shared settings once per strategy name.
  for (const auto& name : cfg.algorithms) {
    AlgorithmConfig probe = cfg.algorithm;
    probe.name = name;
    probe.validate();
  }
  for (const auto& metric : cfg.metrics) {
    if (!known_metrics().count(metric)) {
      std::string joined;
      for (const auto& m : known_metrics()) {
        if (!joined.empty()) joined += ", ";
        joined += m;
      }
      throw ConfigError("unknown metric '" + metric + "' (known: " + joined +
                        ")");
    }
  }
  if (cfg.parallelism < 1) {
    throw ConfigError("parallelism must be >= 1");
  }

  // Echo the resolved settings; feeding this back in reproduces the config.
  json phase = json::object();
  for (const auto& [k, v] : cfg.algorithm.phase_instructions) phase[k] = v;
  cfg.effective = json{
      {"algorithm", cfg.algorithms},
      {"n_docs", cfg.algorithm.n_docs},
      {"gen", cfg.algorithm.gen},
      {"system_instruction", cfg.algorithm.system_instruction},
      {"task_instruction", cfg.algorithm.task_instruction},
      {"algorithm_instruction", cfg.algorithm.algorithm_instruction},
      {"phase_instructions", phase},
      {"iter_retgen", cfg.algorithm.iter_retgen},
      {"self_ask", cfg.algorithm.self_ask},
      {"active_rag", cfg.algorithm.active_rag},
      {"self_rag", cfg.algorithm.self_rag},
      {"generator", generator_to_json(cfg.generator)},
      {"retriever", retriever_to_json(cfg.retriever)},
      {"benchmark", cfg.benchmark},
      {"dataset", cfg.dataset},
      {"keymap", keymap_to_json(cfg.keymap)},
      {"instructions_file", cfg.instructions_file},
      {"presets_file", cfg.presets_file},
      {"metrics", cfg.metrics},
      {"sample_size", cfg.sample_size},
      {"output_dir", cfg.output_dir},
      {"parallelism", cfg.parallelism},
      {"resume", cfg.resume},
      {"save_tracks", cfg.save_tracks}};
  // The echo carries self_rag reflection vocabulary via defaults; the config
  // schema does not expose it, so drop it from the echo to stay loadable.
  if (cfg.effective["self_rag"].contains("vocab")) {
    cfg.effective["self_rag"].erase("vocab");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
  json tree = yaml_file_to_json(path);
  if (tree.is_null()) tree = json::object();
  for (const auto& assignment : overrides) apply_override(tree, assignment);
  return run_config_from_tree(tree);
}

RunConfig run_config_from_overrides(const std::vector<std::string>& overrides) {
  json tree = json::object();
  for (const auto& assignment : overrides) apply_override(tree, assignment);
  return run_config_from_tree(tree);
}

std::shared_ptr<Generator> build_generator(const GeneratorConfig& config) {
  if (config.backend == "scripted") {
    if (config.script.empty()) {
      throw ConfigError(
          "generator.script is required for the scripted backend");
    }
    return ScriptedGenerator::from_file(config.script);
  }
  if (config.backend == "openai") {
    if (config.base_url.empty()) {
      throw ConfigError("generator.base_url is required for the openai backend");
    }
    if (config.model.empty()) {
      throw ConfigError("generator.model is required for the openai backend");
    }
    Endpoint ep;
    ep.name = "default";
    ep.base_url = config.base_url;
    ep.model = config.model;
    ep.api_key_env = config.api_key_env;
    ep.completions_path = config.completions_path;
    return std::make_shared<OpenAiGenerator>(ep);
  }
  throw ConfigError("unknown generator backend '" + config.backend +
                    "' (known: scripted, openai)");
}

std::shared_ptr<Retriever> build_retriever(const RetrieverSetup& config) {
  if (config.mode == "none") return nullptr;
  if (config.mode == "local") {
    if (config.index.empty()) {
      throw ConfigError("retriever.index is required for local mode");
    }
    auto index = std::make_shared<InvertedIndex>(
        InvertedIndex::load_file(config.index));
    auto base = std::make_shared<IndexRetriever>(std::move(index));
    if (!config.cache.empty() || config.cache_max_entries > 0) {
      return std::make_shared<CachingRetriever>(base, config.cache,
                                                config.cache_max_entries);
    }
    return base;
  }
  if (config.mode == "http") {
    if (config.base_url.empty()) {
      throw ConfigError("retriever.base_url is required for http mode");
    }
    return std::make_shared<HttpRetrieverClient>(config.base_url);
  }
  throw ConfigError("unknown retriever mode '" + config.mode +
                    "' (known: none, local, http)");
}

std::shared_ptr<const InstructionStore> build_instructions(
    const std::string& instructions_file) {
  auto store = std::make_shared<InstructionStore>();
  if (instructions_file.empty()) {
    *store = InstructionStore::from_yaml_string(default_instructions_yaml());
  } else {
    *store = InstructionStore::load(instructions_file);
  }
  return store;
}

AlgorithmContext build_context(const RunConfig& config) {
  AlgorithmContext ctx;
  ctx.generator = build_generator(config.generator);
  ctx.retriever = build_retriever(config.retriever);
  ctx.instructions = build_instructions(config.instructions_file);
  return ctx;
}

}  // namespace ragbench

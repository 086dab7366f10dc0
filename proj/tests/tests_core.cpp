// Core-layer tests: text utilities, corpus ingestion, BM25 index (against a
// brute-force oracle), retrieval cache, sentence segmentation, instruction
// store, metrics (against hand-computed and brute-force oracles), dataset
// adapters, benchmark presets, and run-config resolution.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/cache.hpp"
#include "ragbench/config.hpp"
#include "ragbench/corpus.hpp"
#include "ragbench/dataset.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/index.hpp"
#include "ragbench/instructions.hpp"
#include "ragbench/json_io.hpp"
#include "ragbench/metrics.hpp"
#include "ragbench/presets.hpp"
#include "ragbench/retriever.hpp"
#include "ragbench/sentence.hpp"
#include "ragbench/tokenizer.hpp"
#include "ragbench/track.hpp"
#include "ragbench/util.hpp"

using namespace ragbench;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("ragbench_core_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& docs) {
  Corpus corpus;
  int64_t id = 0;
  for (const auto& [title, text] : docs) {
    corpus.passages.push_back(Passage{id++, title, text, 0.0});
  }
  corpus.fingerprint = corpus_fingerprint(corpus.passages);
  return corpus;
}

// Independent BM25 oracle: same formula family as the index, written as a
// direct per-passage scan with no posting lists.
std::vector<Passage> brute_force_bm25(const Corpus& corpus,
                                      const std::string& query, int k,
                                      const Bm25Params& params) {
  const size_t n = corpus.passages.size();
  std::vector<std::vector<std::string>> doc_tokens(n);
  double total_len = 0;
  for (size_t i = 0; i < n; ++i) {
    doc_tokens[i] = tokenize(corpus.passages[i].text);
    total_len += static_cast<double>(doc_tokens[i].size());
  }
  const double avgdl = n ? total_len / static_cast<double>(n) : 0.0;

  // Repeated query terms contribute once per occurrence (qtf weighting).
  std::vector<std::string> q = tokenize(query);

  std::vector<Passage> scored;
  for (size_t i = 0; i < n; ++i) {
    double score = 0;
    for (const auto& term : q) {
      size_t tf = 0;
      for (const auto& t : doc_tokens[i]) {
        if (t == term) ++tf;
      }
      if (tf == 0) continue;
      size_t df = 0;
      for (size_t j = 0; j < n; ++j) {
        if (std::find(doc_tokens[j].begin(), doc_tokens[j].end(), term) !=
            doc_tokens[j].end()) {
          ++df;
        }
      }
      const double idf = std::log(
          1.0 + (static_cast<double>(n) - static_cast<double>(df) + 0.5) /
                    (static_cast<double>(df) + 0.5));
      const double dl = static_cast<double>(doc_tokens[i].size());
      const double tf_part =
          (static_cast<double>(tf) * (params.k1 + 1.0)) /
          (static_cast<double>(tf) +
           params.k1 * (1.0 - params.b + params.b * dl / avgdl));
      score += idf * tf_part;
    }
    if (score > 0) {
      Passage p = corpus.passages[i];
      p.score = score;
      scored.push_back(p);
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Passage& a, const Passage& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.id < b.id;
                   });
  if (k >= 0 && scored.size() > static_cast<size_t>(k)) {
    scored.resize(static_cast<size_t>(k));
  }
  return scored;
}

}  // namespace

// ---------------------------------------------------------------- utilities

TEST_CASE("digest is stable and separator-sensitive") {
  CHECK(fnv1a_hex("") == fnv1a_hex(""));
  CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
  Digest d1, d2;
  d1.update("ab").sep().update("c");
  d2.update("a").sep().update("bc");
  CHECK(d1.hex() != d2.hex());
}

TEST_CASE("trim and whitespace collapsing") {
  CHECK(trim("  x  ") == "x");
  CHECK(trim("\n\t") == "");
  CHECK(collapse_whitespace("a  b\t c") == "a b c");
  CHECK(collapse_double_spaces("a  b") == "a b");
  CHECK(normalize_query("  Foo   BAR ") == "foo bar");
}

TEST_CASE("strip_tokens removes longest-first and counts removals") {
  size_t removed = 0;
  std::string out =
      strip_tokens("x [No Retrieval] y [Retrieval] z",
                   {"[Retrieval]", "[No Retrieval]"}, &removed);
  CHECK(out == "x y z");
  CHECK(removed == 2);
  removed = 0;
  CHECK(strip_tokens("plain", {"[Retrieval]"}, &removed) == "plain");
  CHECK(removed == 0);
}

// ---------------------------------------------------------------- tokenizer

TEST_CASE("tokenizer splits on non-alphanumerics and lowercases") {
  CHECK(tokenize("Henry Feilden's occupation?") ==
        std::vector<std::string>{"henry", "feilden", "s", "occupation"});
  CHECK(tokenize("").empty());
  CHECK(token_count("a a b") == 3);
}

TEST_CASE("tokenizer is idempotent on its own join") {
  const auto toks = tokenize("Re-run: the 2nd Test, PLEASE!");
  std::string joined;
  for (const auto& t : toks) joined += t + " ";
  CHECK(tokenize(joined) == toks);
}

// ------------------------------------------------------------------- corpus

TEST_CASE("chunking splits long documents into word windows") {
  std::string text;
  for (int i = 0; i < 250; ++i) text += "w" + std::to_string(i) + " ";
  auto dir = temp_dir("corpus");
  write_file(dir / "c.tsv", "id\ttext\ttitle\n1\t" + text + "\tDoc\n");
  Corpus corpus = ingest_corpus(dir / "c.tsv", CorpusFormat::dpr_tsv, 100);
  REQUIRE(corpus.passages.size() == 3);
  CHECK(split_whitespace(corpus.passages[0].text).size() == 100);
  CHECK(split_whitespace(corpus.passages[1].text).size() == 100);
  CHECK(split_whitespace(corpus.passages[2].text).size() == 50);
  for (size_t i = 0; i < corpus.passages.size(); ++i) {
    CHECK(corpus.passages[i].id == static_cast<int64_t>(i));
    CHECK(corpus.passages[i].title == "Doc");
    CHECK_FALSE(corpus.passages[i].text.empty());
  }
  // Determinism: same file, same fingerprint.
  Corpus again = ingest_corpus(dir / "c.tsv", CorpusFormat::dpr_tsv, 100);
  CHECK(again.fingerprint == corpus.fingerprint);
}

TEST_CASE("corpus fingerprint changes with content") {
  auto a = corpus_fingerprint({{0, "t", "x", 0.0}});
  CHECK(a != corpus_fingerprint({{0, "t", "y", 0.0}}));
  CHECK(a != corpus_fingerprint({{1, "t", "x", 0.0}}));
  CHECK(a != corpus_fingerprint({{0, "u", "x", 0.0}}));
  CHECK(a == corpus_fingerprint({{0, "t", "x", 0.0}}));
}

TEST_CASE("jsonl corpus ingestion and malformed rows") {
  auto dir = temp_dir("corpusjsonl");
  write_file(dir / "c.jsonl",
             "{\"title\": \"A\", \"text\": \"alpha beta\"}\n"
             "{\"title\": \"B\", \"text\": \"gamma\"}\n");
  Corpus corpus = ingest_corpus(dir / "c.jsonl", CorpusFormat::jsonl, 100);
  REQUIRE(corpus.passages.size() == 2);
  CHECK(corpus.passages[1].title == "B");

  write_file(dir / "bad.tsv", "id\ttext\ttitle\nonly-one-column\n");
  CHECK_THROWS_WITH_AS(ingest_corpus(dir / "bad.tsv", CorpusFormat::dpr_tsv, 100),
                       doctest::Contains("2"), ConfigError);
  write_file(dir / "empty.tsv", "id\ttext\ttitle\n");
  CHECK_THROWS_AS(ingest_corpus(dir / "empty.tsv", CorpusFormat::dpr_tsv, 100),
                  ConfigError);
}

// -------------------------------------------------------------------- index

TEST_CASE("postings of a one-passage corpus") {
  Corpus corpus = make_corpus({{"t", "a a b"}});
  InvertedIndex index = InvertedIndex::build(corpus);
  const auto& postings = index.postings();
  REQUIRE(postings.count("a") == 1);
  REQUIRE(postings.count("b") == 1);
  CHECK(postings.at("a").front().passage_id == 0);
  CHECK(postings.at("a").front().term_freq == 2);
  CHECK(postings.at("b").front().term_freq == 1);
  CHECK(index.avg_doc_length() == doctest::Approx(3.0));
  IndexStats stats = index.stats();
  CHECK(stats.passage_count == 1);
  CHECK(stats.term_count == 2);
}

TEST_CASE("index postings equal an independent recount") {
  Corpus corpus = make_corpus({{"t0", "red fish blue fish"},
                               {"t1", "one red one"},
                               {"t2", "blue blue blue fish"}});
  InvertedIndex index = InvertedIndex::build(corpus);

  std::map<std::string, std::map<int64_t, int32_t>> oracle;
  size_t total_tokens = 0;
  for (const auto& p : corpus.passages) {
    for (const auto& tok : tokenize(p.text)) {
      oracle[tok][p.id]++;
      ++total_tokens;
    }
  }
  REQUIRE(index.postings().size() == oracle.size());
  size_t tf_sum = 0;
  for (const auto& [term, list] : index.postings()) {
    REQUIRE(oracle.count(term) == 1);
    REQUIRE(list.size() == oracle[term].size());
    CHECK(std::is_sorted(list.begin(), list.end(),
                         [](const Posting& a, const Posting& b) {
                           return a.passage_id < b.passage_id;
                         }));
    for (const auto& posting : list) {
      CHECK(oracle[term][posting.passage_id] == posting.term_freq);
      tf_sum += static_cast<size_t>(posting.term_freq);
    }
  }
  // Sum of term frequencies equals the token count of the corpus.
  CHECK(tf_sum == total_tokens);
}

TEST_CASE("index build and serialization are deterministic") {
  Corpus corpus = make_corpus({{"a", "x y z"}, {"b", "y z z"}});
  InvertedIndex i1 = InvertedIndex::build(corpus);
  InvertedIndex i2 = InvertedIndex::build(corpus);
  std::ostringstream s1, s2;
  i1.save(s1);
  i2.save(s2);
  CHECK(s1.str() == s2.str());

  auto dir = temp_dir("index");
  i1.save_file(dir / "idx.bin");
  InvertedIndex loaded = InvertedIndex::load_file(dir / "idx.bin");
  std::ostringstream s3;
  loaded.save(s3);
  CHECK(s3.str() == s1.str());
  CHECK(loaded.fingerprint() == i1.fingerprint());
  CHECK(loaded.config_digest() == i1.config_digest());
}

TEST_CASE("search excludes non-matching passages and honors tie-breaks") {
  Corpus corpus = make_corpus(
      {{"t0", "apple banana"}, {"t1", "apple banana"}, {"t2", "cherry"}});
  InvertedIndex index = InvertedIndex::build(corpus);
  CHECK(index.search("durian kiwi", 5).empty());
  auto hits = index.search("apple", 5);
  REQUIRE(hits.size() == 2);
  // Equal scores: ascending id.
  CHECK(hits[0].id == 0);
  CHECK(hits[1].id == 1);
  for (const auto& h : hits) CHECK(h.score > 0);
}

TEST_CASE("search agrees with the brute-force oracle on a toy corpus") {
  Corpus corpus = make_corpus({{"t0", "the quick brown fox"},
                               {"t1", "the lazy dog sleeps"},
                               {"t2", "quick dogs and quick cats"},
                               {"t3", "brown bears eat fish"}});
  InvertedIndex index = InvertedIndex::build(corpus);
  for (const std::string query :
       {"quick brown", "the dog", "fish", "quick quick cats"}) {
    auto got = index.search(query, static_cast<int>(corpus.passages.size()));
    auto want = brute_force_bm25(corpus, query,
                                 static_cast<int>(corpus.passages.size()), {});
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].id == want[i].id);
      CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("config digest reflects scoring parameters, not corpus") {
  Corpus c1 = make_corpus({{"a", "x"}});
  Corpus c2 = make_corpus({{"b", "y z"}});
  InvertedIndex base = InvertedIndex::build(c1);
  CHECK(InvertedIndex::build(c2).config_digest() == base.config_digest());
  CHECK(InvertedIndex::build(c1, Bm25Params{1.2, 0.4}).config_digest() !=
        base.config_digest());
  CHECK(InvertedIndex::build(c1, Bm25Params{0.9, 0.75}).config_digest() !=
        base.config_digest());
}

// -------------------------------------------------------------------- cache

TEST_CASE("cache key equality is (normalized query, k, corpus, config)") {
  CacheKey a = make_cache_key("  The  Query ", 5, "fp", "cd");
  CacheKey b = make_cache_key("the query", 5, "fp", "cd");
  CHECK(a == b);
  CHECK_FALSE(a == make_cache_key("the query", 6, "fp", "cd"));
  CHECK_FALSE(a == make_cache_key("the query", 5, "fp2", "cd"));
  CHECK_FALSE(a == make_cache_key("the query", 5, "fp", "cd2"));
}

TEST_CASE("cache hits never reach the index and results are byte-identical") {
  Corpus corpus = make_corpus(
      {{"t0", "alpha beta"}, {"t1", "beta gamma"}, {"t2", "gamma delta"}});
  auto index = std::make_shared<InvertedIndex>(InvertedIndex::build(corpus));
  auto inner = std::make_shared<IndexRetriever>(index);
  CachingRetriever cache(inner);

  SearchResult miss = cache.search("beta", 2);
  CHECK_FALSE(miss.cache_hit);
  size_t calls_after_miss = inner->search_calls();
  SearchResult hit = cache.search("beta", 2);
  CHECK(hit.cache_hit);
  CHECK(inner->search_calls() == calls_after_miss);
  CHECK(json(miss.passages).dump() == json(hit.passages).dump());

  // k participates in the key.
  CHECK_FALSE(cache.search("beta", 3).cache_hit);
  // Whitespace-normalized query still hits.
  CHECK(cache.search("  beta ", 2).cache_hit);

  CacheStats stats = cache.stats();
  CHECK(stats.total_queries == 4);
  CHECK(stats.cache_hits + stats.cache_misses == stats.total_queries);
}

TEST_CASE("cache journal persists across construction") {
  Corpus corpus = make_corpus({{"t0", "alpha beta"}, {"t1", "beta gamma"}});
  auto index = std::make_shared<InvertedIndex>(InvertedIndex::build(corpus));
  auto dir = temp_dir("cache");
  auto journal = dir / "cache.jsonl";
  {
    CachingRetriever cache(std::make_shared<IndexRetriever>(index), journal);
    CHECK_FALSE(cache.search("alpha", 1).cache_hit);
    cache.persist();
  }
  {
    CachingRetriever cache(std::make_shared<IndexRetriever>(index), journal);
    CHECK(cache.load_warning().empty());
    CHECK(cache.search("alpha", 1).cache_hit);
    CHECK_FALSE(cache.search("gamma", 1).cache_hit);
  }
}

TEST_CASE("bounded cache evicts least-recently-used entries") {
  Corpus corpus = make_corpus(
      {{"t0", "aa"}, {"t1", "bb"}, {"t2", "cc"}});
  auto index = std::make_shared<InvertedIndex>(InvertedIndex::build(corpus));
  CachingRetriever cache(std::make_shared<IndexRetriever>(index), {}, 2);
  cache.search("aa", 1);
  cache.search("bb", 1);
  CHECK(cache.entry_count() == 2);
  cache.search("aa", 1);          // refresh aa
  cache.search("cc", 1);          // evicts bb
  CHECK(cache.entry_count() == 2);
  CHECK(cache.search("aa", 1).cache_hit);
  CHECK_FALSE(cache.search("bb", 1).cache_hit);
}

// ---------------------------------------------------------------- sentences

TEST_CASE("sentence segmentation boundary and whitespace rules") {
  CHECK(sentence_segment("A. B? C") ==
        std::vector<std::string>{"A.", " B?", " C"});
  CHECK(sentence_segment("").empty());
  CHECK(sentence_segment("No terminator") ==
        std::vector<std::string>{"No terminator"});
  CHECK(sentence_segment("One! Two.") ==
        std::vector<std::string>{"One!", " Two."});
}

TEST_CASE("abbreviations and initials do not end sentences") {
  CHECK(sentence_segment("Dr. Smith arrived. He left.") ==
        std::vector<std::string>{"Dr. Smith arrived.", " He left."});
  CHECK(sentence_segment("See e.g. the appendix. Done.") ==
        std::vector<std::string>{"See e.g. the appendix.", " Done."});
  // Bare single letters do split ("A. B? C" above is normative).
  CHECK(sentence_segment("J. R. Tolkien") ==
        std::vector<std::string>{"J.", " R.", " Tolkien"});
}

TEST_CASE("segmentation is lossless on random strings") {
  std::mt19937 rng(1234);
  const std::string alphabet = "abc .!?\nXY.z  ";
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<size_t> len(0, 40);
  for (int trial = 0; trial < 100; ++trial) {
    std::string s;
    const size_t n = len(rng);
    for (size_t i = 0; i < n; ++i) s += alphabet[pick(rng)];
    std::string joined;
    for (const auto& seg : sentence_segment(s)) joined += seg;
    CHECK(joined == s);
  }
}

// ------------------------------------------------------------- instructions

TEST_CASE("instruction store loads pools and counts templates") {
  std::string yaml = "system:\n  - name: default\n    template: \"S\"\n";
  yaml += "task:\n";
  for (int i = 0; i < 10; ++i) {
    yaml += "  - name: t" + std::to_string(i) + "\n    template: \"T" +
            std::to_string(i) + " {query}\"\n    placeholders: [query]\n";
  }
  yaml += "algorithm:\n";
  for (int i = 0; i < 7; ++i) {
    yaml += "  - name: a" + std::to_string(i) + "\n    template: \"A" +
            std::to_string(i) + "\"\n";
  }
  InstructionStore store = InstructionStore::from_yaml_string(yaml);
  CHECK(store.size() == 18);
  CHECK(store.contains("task", "t3"));
  CHECK_FALSE(store.contains("task", "missing"));
}

TEST_CASE("duplicate names and undeclared placeholders are load errors") {
  CHECK_THROWS_AS(InstructionStore::from_yaml_string(
                      "task:\n  - name: x\n    template: \"a\"\n"
                      "  - name: x\n    template: \"b\"\n"),
                  ConfigError);
  CHECK_THROWS_WITH_AS(
      InstructionStore::from_yaml_string(
          "task:\n  - name: x\n    template: \"Q {query}\"\n"),
      doctest::Contains("query"), ConfigError);
}

TEST_CASE("rendering substitutes, joins non-empty parts, honors escapes") {
  InstructionStore store = InstructionStore::from_yaml_string(
      "system:\n  - name: default\n    template: \"SYS\"\n"
      "  - name: empty\n    template: \"\"\n"
      "task:\n  - name: q\n    template: \"Q: {query}\"\n"
      "    placeholders: [query]\n"
      "algorithm:\n  - name: a\n    template: \"A {query} {{literal}}\"\n"
      "    placeholders: [query]\n");
  PromptAssembly assembly{"default", "q", "a", {{"query", "hi"}}};
  CHECK(render(store, assembly) == "SYS\n\nQ: hi\n\nA hi {literal}");
  PromptAssembly with_empty{"empty", "q", "a", {{"query", "hi"}}};
  CHECK(render(store, with_empty) == "Q: hi\n\nA hi {literal}");
  CHECK(render(store, assembly) == render(store, assembly));

  PromptAssembly unbound{"default", "q", "a", {}};
  CHECK_THROWS_WITH_AS(render(store, unbound), doctest::Contains("query"),
                       ConfigError);
}

TEST_CASE("format_passages emits numbered blocks") {
  std::vector<Passage> ps{{7, "t1", "x1", 0.0}, {9, "t2", "x2", 0.0}};
  CHECK(format_passages(ps) == "[1] t1\nx1\n\n[2] t2\nx2");
  CHECK(format_passages(std::span<const Passage>{}) == "");
}

TEST_CASE("builtin instruction set covers benchmarks and strategies") {
  InstructionStore store =
      InstructionStore::from_yaml_string(default_instructions_yaml());
  CHECK(store.size() == 23);
  CHECK(store.contains("system", "default"));
  for (const std::string name :
       {"default", "popqa", "triviaqa", "hotpotqa", "2wikimultihopqa", "arc",
        "mmlu", "pubhealth", "strategyqa", "factscore", "asqa"}) {
    CHECK(store.contains("task", name));
  }
  for (const std::string name :
       {"direct", "naive", "rrr_rewrite", "rrr_read", "iter_retgen",
        "self_ask", "self_ask_intermediate", "active_rag_draft",
        "active_rag_regen", "self_rag_continue", "self_rag_passage"}) {
    CHECK(store.contains("algorithm", name));
  }
}

// ------------------------------------------------------------------ metrics

TEST_CASE("normalization lowercases, strips punctuation, drops articles") {
  CHECK(normalize_text("The Cat!") == "cat");
  CHECK(normalize_text("a  an the") == "");
  CHECK(normalize_text(normalize_text("A  Mixed-Case, Text")) ==
        normalize_text("A  Mixed-Case, Text"));
  CHECK(metric_tokens("the cat sat") ==
        std::vector<std::string>{"the", "cat", "sat"});
}

TEST_CASE("accuracy is substring cover-match") {
  CHECK(metric_accuracy("It is Paris, France", {"Paris"}) == 1.0);
  CHECK(metric_accuracy("London", {"Paris"}) == 0.0);
  CHECK(metric_accuracy("Paris", {"Paris"}) == 1.0);
}

TEST_CASE("exact match") {
  CHECK(metric_em("Paris", {"Paris"}) == 1.0);
  CHECK(metric_em("Paris, France", {"Paris"}) == 0.0);
  CHECK(metric_em("the Paris", {"Paris"}) == 1.0);  // article dropped
}

TEST_CASE("token F1 agrees with the worked example") {
  CHECK(metric_f1("the cat sat", {"cat sat down"}) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(metric_f1("same words", {"same words"}) == doctest::Approx(1.0));
  CHECK(metric_f1("abc", {"xyz"}) == doctest::Approx(0.0));
  // EM = 1 implies F1 = 1.
  CHECK(metric_em("Paris", {"Paris"}) == 1.0);
  CHECK(metric_f1("Paris", {"Paris"}) == doctest::Approx(1.0));
  // Max over golds.
  CHECK(metric_f1("cat", {"dog", "cat"}) == doctest::Approx(1.0));
}

TEST_CASE("ROUGE-L agrees with the worked example") {
  CHECK(metric_rouge_l("a b c d", "a c d b") == doctest::Approx(0.75));
  CHECK(metric_rouge_l("x y", "x y") == doctest::Approx(1.0));
  CHECK(metric_rouge_l("p q", "r s") == doctest::Approx(0.0));
}

TEST_CASE("str-em and str-hit") {
  std::vector<std::vector<std::string>> sets{{"Paris"}, {"Rome", "Roma"}};
  CHECK(metric_str_em("We saw Paris and then Roma", sets) == doctest::Approx(1.0));
  CHECK(metric_str_hit("We saw Paris and then Roma", sets) == 1.0);
  CHECK(metric_str_em("Only Paris here", sets) == doctest::Approx(0.5));
  CHECK(metric_str_hit("Only Paris here", sets) == 0.0);
  CHECK_THROWS_AS(metric_str_em("x", {}), std::invalid_argument);
}

// ------------------------------------------------------------------ dataset

TEST_CASE("dataset adapter maps keys and coerces scalars") {
  auto dir = temp_dir("dataset");
  write_file(dir / "d.jsonl",
             "{\"q\": \"x\", \"a\": [\"y\"]}\n"
             "{\"q\": \"w\", \"a\": \"z\"}\n");
  KeyMap km;
  km.question_key = "q";
  km.answers_key = "a";
  auto items = load_dataset(dir / "d.jsonl", km);
  REQUIRE(items.size() == 2);
  CHECK(items[0].question == "x");
  CHECK(items[0].golds == std::vector<std::string>{"y"});
  CHECK(items[1].golds == std::vector<std::string>{"z"});
  CHECK(items[0].id == "0");
  CHECK(items[1].id == "1");
}

TEST_CASE("dataset errors carry the file position") {
  auto dir = temp_dir("dataseterr");
  write_file(dir / "bad.jsonl", "{\"q\": \"x\", \"a\": [\"y\"]}\n{\"q\": \"no answers\"}\n");
  KeyMap km;
  km.question_key = "q";
  km.answers_key = "a";
  CHECK_THROWS_WITH_AS(load_dataset(dir / "bad.jsonl", km),
                       doctest::Contains(":2:"), ConfigError);

  write_file(dir / "dup.jsonl",
             "{\"id\": \"same\", \"q\": \"x\", \"a\": [\"y\"]}\n"
             "{\"id\": \"same\", \"q\": \"w\", \"a\": [\"z\"]}\n");
  km.id_key = "id";
  CHECK_THROWS_WITH_AS(load_dataset(dir / "dup.jsonl", km),
                       doctest::Contains("same"), ConfigError);
}

TEST_CASE("choice schemas: string list, label/text pairs, parallel arrays") {
  auto dir = temp_dir("choices");
  write_file(
      dir / "c.jsonl",
      "{\"question\": \"q1\", \"answers\": [\"A\"], \"choices\": [\"one\", \"two\"]}\n"
      "{\"question\": \"q2\", \"answers\": [\"B\"], \"choices\": "
      "[{\"label\": \"X\", \"text\": \"ex\"}, {\"label\": \"Y\", \"text\": \"why\"}]}\n"
      "{\"question\": \"q3\", \"answers\": [\"C\"], \"choices\": "
      "{\"text\": [\"tee\", \"you\"], \"label\": [\"C\", \"D\"]}}\n");
  KeyMap km;
  km.choices_key = "choices";
  auto items = load_dataset(dir / "c.jsonl", km);
  REQUIRE(items.size() == 3);
  CHECK(items[0].choices ==
        std::vector<std::pair<std::string, std::string>>{{"A", "one"},
                                                         {"B", "two"}});
  CHECK(items[1].choices ==
        std::vector<std::pair<std::string, std::string>>{{"X", "ex"},
                                                         {"Y", "why"}});
  CHECK(items[2].choices ==
        std::vector<std::pair<std::string, std::string>>{{"C", "tee"},
                                                         {"D", "you"}});
  CHECK(format_choices(items[0]) == "A. one\nB. two");
}

TEST_CASE("sequential sampling takes a prefix and preserves order") {
  std::vector<BenchmarkItem> items;
  for (int i = 0; i < 1000; ++i) {
    BenchmarkItem item;
    item.id = std::to_string(i);
    item.question = "q";
    item.golds = {"g"};
    items.push_back(item);
  }
  auto sampled = sample_sequential(items, 500);
  REQUIRE(sampled.size() == 500);
  CHECK(sampled.front().id == "0");
  CHECK(sampled.back().id == "499");
  CHECK(sample_sequential(items, 5000).size() == 1000);
  CHECK(sample_sequential(items, 0).size() == 0);
}

// ------------------------------------------------------------------ presets

TEST_CASE("builtin benchmark presets match the documented table") {
  auto presets = builtin_presets();
  CHECK(presets.size() == 10);
  for (const std::string name :
       {"popqa", "triviaqa", "hotpotqa", "2wikimultihopqa", "strategyqa"}) {
    CHECK(presets.at(name).max_length == 300);
    CHECK(presets.at(name).n_docs == 10);
  }
  for (const std::string name : {"arc", "pubhealth", "mmlu"}) {
    CHECK(presets.at(name).max_length == 50);
    CHECK(presets.at(name).n_docs == 10);
  }
  for (const std::string name : {"factscore", "asqa"}) {
    CHECK(presets.at(name).max_length == 300);
    CHECK(presets.at(name).n_docs == 5);
  }
  CHECK(presets.at("popqa").metrics ==
        std::vector<std::string>{"accuracy", "f1"});
  CHECK(presets.at("asqa").metrics ==
        std::vector<std::string>{"str_em", "str_hit", "rouge_l"});
  CHECK(presets.at("arc").keymap.choices_key == "choices");
  CHECK(presets.at("asqa").keymap.answer_sets_key == "answer_sets");
}

TEST_CASE("unknown preset error lists the known names") {
  CHECK_THROWS_WITH_AS(resolve_preset("nope"), doctest::Contains("popqa"),
                       ConfigError);
}

TEST_CASE("presets file extends and overrides the builtins") {
  auto dir = temp_dir("presets");
  write_file(dir / "p.yaml",
             "mybench:\n  metrics: [em]\n  max_length: 77\n  n_docs: 3\n"
             "  keymap: {question_key: ques, answers_key: ans}\n");
  auto extra = load_presets_file(dir / "p.yaml");
  BenchmarkPreset p = resolve_preset("mybench", extra);
  CHECK(p.max_length == 77);
  CHECK(p.n_docs == 3);
  CHECK(p.keymap.question_key == "ques");
  // Builtins still resolvable alongside.
  CHECK(resolve_preset("popqa", extra).n_docs == 10);
}

// ------------------------------------------------------------------- config

TEST_CASE("yaml scalars keep conservative typing") {
  auto dir = temp_dir("configscalars");
  write_file(dir / "c.yaml",
             "self_rag: {mode: no}\n"
             "resume: true\n"
             "save_tracks: False\n"
             "seed: 7\n"
             "gen: {temperature: 0.5}\n"
             "task_instruction: \"true\"\n");
  RunConfig cfg = load_run_config(dir / "c.yaml");
  CHECK(cfg.algorithm.self_rag.mode == "no");  // not a boolean
  CHECK(cfg.resume == true);
  CHECK(cfg.save_tracks == false);
  CHECK(cfg.algorithm.gen.seed == 7);
  CHECK(cfg.algorithm.gen.temperature == doctest::Approx(0.5));
  CHECK(cfg.algorithm.task_instruction == "true");  // quoted stays string
}

TEST_CASE("unknown config keys are rejected at every level") {
  json tree{{"bogus", 1}};
  CHECK_THROWS_WITH_AS(run_config_from_tree(tree), doctest::Contains("bogus"),
                       ConfigError);
  json nested{{"gen", json{{"max_tokens", 5}}}};
  CHECK_THROWS_WITH_AS(run_config_from_tree(nested),
                       doctest::Contains("max_tokens"), ConfigError);
}

TEST_CASE("benchmark preset applies, explicit keys win") {
  json tree{{"benchmark", "arc"}, {"dataset", "d.jsonl"}};
  RunConfig cfg = run_config_from_tree(tree);
  CHECK(cfg.algorithm.gen.max_new_tokens == 50);
  CHECK(cfg.algorithm.n_docs == 10);
  CHECK(cfg.keymap.choices_key == "choices");
  CHECK(cfg.algorithm.task_instruction == "arc");

  tree["n_docs"] = 4;
  tree["gen"] = json{{"max_new_tokens", 123}};
  tree["task_instruction"] = "default";
  RunConfig over = run_config_from_tree(tree);
  CHECK(over.algorithm.n_docs == 4);
  CHECK(over.algorithm.gen.max_new_tokens == 123);
  CHECK(over.algorithm.task_instruction == "default");
}

TEST_CASE("seed shorthand flows into gen.seed unless gen.seed is explicit") {
  CHECK(run_config_from_tree(json{{"seed", 99}}).algorithm.gen.seed == 99);
  json both{{"seed", 99}, {"gen", json{{"seed", 11}}}};
  CHECK(run_config_from_tree(both).algorithm.gen.seed == 11);
}

TEST_CASE("overrides apply dotted paths with scalar typing") {
  json tree = json::object();
  apply_override(tree, "self_rag.mode=no");
  apply_override(tree, "gen.temperature=0.25");
  apply_override(tree, "algorithm=[\"direct\",\"naive\"]");
  apply_override(tree, "resume=false");
  RunConfig cfg = run_config_from_tree(tree);
  CHECK(cfg.algorithm.self_rag.mode == "no");
  CHECK(cfg.algorithm.gen.temperature == doctest::Approx(0.25));
  CHECK(cfg.algorithms == std::vector<std::string>{"direct", "naive"});
  CHECK(cfg.resume == false);
  CHECK_THROWS_AS(apply_override(tree, "no-equals-sign"), ConfigError);
}

TEST_CASE("effective config round-trips to the same resolution") {
  json tree{{"benchmark", "hotpotqa"},
            {"dataset", "d.jsonl"},
            {"algorithm", json::array({"naive", "self_rag"})},
            {"seed", 5},
            {"self_rag", json{{"mode", "always"}, {"beam_width", 3}}}};
  RunConfig first = run_config_from_tree(tree);
  RunConfig second = run_config_from_tree(first.effective);
  CHECK(first.effective == second.effective);
  CHECK(second.algorithm.self_rag.mode == "always");
  CHECK(second.algorithm.gen.seed == 5);
  CHECK(second.algorithms == first.algorithms);
}

TEST_CASE("config validation rejects bad values") {
  CHECK_THROWS_AS(run_config_from_tree(json{{"algorithm", "nope"}}),
                  ConfigError);
  CHECK_THROWS_AS(run_config_from_tree(json{{"metrics", json::array({"bleu"})}}),
                  ConfigError);
  CHECK_THROWS_AS(run_config_from_tree(json{{"parallelism", 0}}), ConfigError);
  CHECK_THROWS_AS(
      run_config_from_tree(json{{"active_rag", json{{"filter_prob", 1.5}}}}),
      ConfigError);
  CHECK_THROWS_AS(
      run_config_from_tree(json{{"self_rag", json{{"mode", "sometimes"}}}}),
      ConfigError);
  CHECK_THROWS_AS(
      run_config_from_tree(json{{"retriever", json{{"mode", "carrier-pigeon"}}}}),
      ConfigError);
}

// -------------------------------------------------------------------- track

TEST_CASE("track counts steps by kind and serializes") {
  GenerationTrack track;
  track.algorithm = "naive";
  track.query = "q";
  track.add(RetrievalStep{"q", 2, {{0, "t", "x", 1.0}}, false});
  track.add(GenerationStep{"answer", "prompt", GenerationOutput{"out", {}, FinishReason::stop}});
  track.add(DecisionStep{"note", "detail"});
  track.answer = "out";
  CHECK(track.retrieval_count() == 1);
  CHECK(track.generation_count() == 1);
  CHECK(track.decision_count() == 1);

  json j = track;
  REQUIRE(j["steps"].size() == 3);
  CHECK(j["steps"][0]["type"] == "retrieval");
  CHECK(j["steps"][1]["type"] == "generation");
  CHECK(j["steps"][2]["type"] == "decision");
  std::string text = format_track(track);
  CHECK(text.find("out") != std::string::npos);
  CHECK(text.find("[retrieval]") != std::string::npos);
}

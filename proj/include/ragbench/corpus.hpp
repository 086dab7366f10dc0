#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ragbench {

/// One retrievable text chunk. `score` is only meaningful on passages
/// returned from a search, where it carries the retrieval relevance value.
struct Passage {
  int64_t id = 0;
  std::string title;
  std::string text;
  double score = 0.0;

  bool operator==(const Passage& other) const {
    return id == other.id && title == other.title && text == other.text &&
           score == other.score;
  }
};

struct Corpus {
  std::vector<Passage> passages;
  std::string fingerprint;  // stable content digest over ids+titles+texts
};

enum class CorpusFormat { dpr_tsv, jsonl };

CorpusFormat parse_corpus_format(const std::string& name);

/// Digest of passage ids, titles and texts. Changes iff any of them changes.
std::string corpus_fingerprint(const std::vector<Passage>& passages);

/// Split each source document into consecutive windows of at most
/// `chunk_words` whitespace tokens. Windows inherit the source title;
/// passage ids are assigned densely from 0 in ingestion order.
///
/// dpr-tsv rows are `id<TAB>text<TAB>title` with an optional header row;
/// jsonl objects carry "title" and "text". Malformed rows raise ConfigError
/// naming the line number; an empty corpus is an error.
Corpus ingest_corpus(const std::filesystem::path& source, CorpusFormat format,
                     int chunk_words);

}  // namespace ragbench

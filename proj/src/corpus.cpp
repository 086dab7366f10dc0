#include "ragbench/corpus.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ragbench/errors.hpp"
#include "ragbench/util.hpp"

namespace ragbench {

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "dpr-tsv") return CorpusFormat::dpr_tsv;
  if (name == "jsonl") return CorpusFormat::jsonl;
  throw ConfigError("unknown corpus format '" + name +
                    "' (expected dpr-tsv or jsonl)");
}

std::string corpus_fingerprint(const std::vector<Passage>& passages) {
  Digest d;
  for (const auto& p : passages) {
    d.update_u64(static_cast<uint64_t>(p.id));
    d.sep();
    d.update(p.title);
    d.sep();
    d.update(p.text);
    d.sep();
  }
  return d.hex();
}

namespace {

struct SourceDoc {
  std::string title;
  std::string text;
};

void append_chunks(const SourceDoc& doc, int chunk_words,
                   std::vector<Passage>& out) {
  auto words = split_whitespace(doc.text);
  for (size_t start = 0; start < words.size();
       start += static_cast<size_t>(chunk_words)) {
    size_t end = std::min(words.size(), start + static_cast<size_t>(chunk_words));
    std::string body;
    for (size_t i = start; i < end; ++i) {
      if (i > start) body.push_back(' ');
      body += words[i];
    }
    Passage p;
    p.id = static_cast<int64_t>(out.size());
    p.title = doc.title;
    p.text = std::move(body);
    out.push_back(std::move(p));
  }
}

std::vector<SourceDoc> read_dpr_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file: " + path.string());
  std::vector<SourceDoc> docs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos
                                        : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos ||
        line.find('\t', t2 + 1) != std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed dpr-tsv row (expected id<TAB>text<TAB>title)");
    }
    std::string id_field = line.substr(0, t1);
    std::string text = line.substr(t1 + 1, t2 - t1 - 1);
    std::string title = line.substr(t2 + 1);
    if (lineno == 1 && id_field == "id") continue;  // optional header row
    try {
      size_t pos = 0;
      (void)std::stoll(id_field, &pos);
      if (pos != id_field.size()) throw std::invalid_argument("trailing chars");
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed dpr-tsv row (id '" + id_field +
                        "' is not an integer)");
    }
    if (trim(text).empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed dpr-tsv row (empty text)");
    }
    docs.push_back({std::move(title), std::move(text)});
  }
  return docs;
}

std::vector<SourceDoc> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file: " + path.string());
  std::vector<SourceDoc> docs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed jsonl row: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("title") || !rec.contains("text") ||
        !rec["title"].is_string() || !rec["text"].is_string()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed jsonl row (need string fields title, text)");
    }
    std::string text = rec["text"].get<std::string>();
    if (trim(text).empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed jsonl row (empty text)");
    }
    docs.push_back({rec["title"].get<std::string>(), std::move(text)});
  }
  return docs;
}

}  // namespace

Corpus ingest_corpus(const std::filesystem::path& source, CorpusFormat format,
                     int chunk_words) {
  if (chunk_words < 1) throw ConfigError("chunk_words must be >= 1");
  auto docs = format == CorpusFormat::dpr_tsv ? read_dpr_tsv(source)
                                              : read_jsonl(source);
  Corpus corpus;
  for (const auto& doc : docs) append_chunks(doc, chunk_words, corpus.passages);
  if (corpus.passages.empty()) {
    throw ConfigError("empty corpus: " + source.string());
  }
  corpus.fingerprint = corpus_fingerprint(corpus.passages);
  return corpus;
}

}  // namespace ragbench

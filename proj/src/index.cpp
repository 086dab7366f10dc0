#include "ragbench/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ragbench/errors.hpp"
#include "ragbench/tokenizer.hpp"
#include "ragbench/util.hpp"

namespace ragbench {
namespace {

constexpr char kMagic[4] = {'R', 'B', 'I', 'X'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void write_u64(std::ostream& out, uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

void write_f64(std::ostream& out, double v) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

void write_str(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& in) {
  char buf[4];
  in.read(buf, 4);
  if (!in) throw ConfigError("truncated index file");
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(buf[i]);
  return v;
}

uint64_t read_u64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  if (!in) throw ConfigError("truncated index file");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(buf[i]);
  return v;
}

double read_f64(std::istream& in) {
  uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::string read_str(std::istream& in) {
  uint64_t n = read_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw ConfigError("truncated index file");
  return s;
}

}  // namespace

InvertedIndex InvertedIndex::build(const Corpus& corpus, Bm25Params params) {
  if (corpus.passages.empty()) throw ConfigError("cannot index an empty corpus");
  InvertedIndex idx;
  idx.passages_ = corpus.passages;
  for (auto& p : idx.passages_) p.score = 0.0;
  idx.params_ = params;
  idx.tokenizer_id_ = kTokenizerId;
  idx.fingerprint_ = corpus.fingerprint.empty()
                         ? corpus_fingerprint(corpus.passages)
                         : corpus.fingerprint;

  idx.doc_lengths_.reserve(idx.passages_.size());
  uint64_t total_len = 0;
  for (const auto& p : idx.passages_) {
    auto tokens = tokenize(p.text);
    idx.doc_lengths_.push_back(static_cast<int32_t>(tokens.size()));
    total_len += tokens.size();
    std::map<std::string, int32_t> freqs;
    for (auto& t : tokens) ++freqs[t];
    for (auto& [term, tf] : freqs) {
      idx.postings_[term].push_back({p.id, tf});
    }
  }
  // Passages are visited in ascending id order, so posting lists come out
  // sorted; assert the invariant anyway for safety after refactors.
  for (auto& [term, list] : idx.postings_) {
    (void)term;
    for (size_t i = 1; i < list.size(); ++i) {
      if (list[i - 1].passage_id >= list[i].passage_id) {
        std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) {
          return a.passage_id < b.passage_id;
        });
        break;
      }
    }
  }
  idx.avgdl_ = static_cast<double>(total_len) /
               static_cast<double>(idx.passages_.size());
  return idx;
}

std::vector<Passage> InvertedIndex::search(const std::string& query, int k) const {
  if (k < 1) throw ConfigError("search k must be >= 1");
  std::map<std::string, int> query_tf;
  for (auto& t : tokenize(query)) ++query_tf[t];

  const double n_docs = static_cast<double>(passages_.size());
  std::map<int64_t, double> scores;  // ordered: deterministic accumulation
  for (const auto& [term, qtf] : query_tf) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& list = it->second;
    const double df = static_cast<double>(list.size());
    // Non-negative IDF variant; always > 0, which keeps every matched
    // passage's score strictly positive.
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const auto& post : list) {
      const double tf = static_cast<double>(post.term_freq);
      const double dl = static_cast<double>(doc_lengths_[post.passage_id]);
      const double denom =
          tf + params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl_);
      scores[post.passage_id] +=
          static_cast<double>(qtf) * idf * tf * (params_.k1 + 1.0) / denom;
    }
  }

  std::vector<std::pair<int64_t, double>> ranked(scores.begin(), scores.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<size_t>(k)) ranked.resize(static_cast<size_t>(k));

  std::vector<Passage> out;
  out.reserve(ranked.size());
  for (const auto& [id, score] : ranked) {
    Passage p = passages_[static_cast<size_t>(id)];
    p.score = score;
    out.push_back(std::move(p));
  }
  return out;
}

IndexStats InvertedIndex::stats() const {
  return {passages_.size(), postings_.size(), avgdl_};
}

void InvertedIndex::save(std::ostream& out) const {
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_str(out, tokenizer_id_);
  write_f64(out, params_.k1);
  write_f64(out, params_.b);
  write_str(out, fingerprint_);
  write_u64(out, passages_.size());
  for (const auto& p : passages_) {
    write_u64(out, static_cast<uint64_t>(p.id));
    write_str(out, p.title);
    write_str(out, p.text);
  }
  for (int32_t len : doc_lengths_) write_u32(out, static_cast<uint32_t>(len));
  write_u64(out, postings_.size());
  for (const auto& [term, list] : postings_) {
    write_str(out, term);
    write_u64(out, list.size());
    for (const auto& post : list) {
      write_u64(out, static_cast<uint64_t>(post.passage_id));
      write_u32(out, static_cast<uint32_t>(post.term_freq));
    }
  }
}

void InvertedIndex::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write index file: " + path.string());
  save(out);
  if (!out) throw ConfigError("failed writing index file: " + path.string());
}

InvertedIndex InvertedIndex::load(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("not an index file (bad magic)");
  }
  uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw ConfigError("unsupported index version " + std::to_string(version));
  }
  InvertedIndex idx;
  idx.tokenizer_id_ = read_str(in);
  idx.params_.k1 = read_f64(in);
  idx.params_.b = read_f64(in);
  idx.fingerprint_ = read_str(in);
  uint64_t n = read_u64(in);
  idx.passages_.resize(n);
  for (uint64_t i = 0; i < n; ++i) {
    idx.passages_[i].id = static_cast<int64_t>(read_u64(in));
    idx.passages_[i].title = read_str(in);
    idx.passages_[i].text = read_str(in);
  }
  idx.doc_lengths_.resize(n);
  uint64_t total_len = 0;
  for (uint64_t i = 0; i < n; ++i) {
    idx.doc_lengths_[i] = static_cast<int32_t>(read_u32(in));
    total_len += static_cast<uint64_t>(idx.doc_lengths_[i]);
  }
  uint64_t terms = read_u64(in);
  for (uint64_t t = 0; t < terms; ++t) {
    std::string term = read_str(in);
    uint64_t len = read_u64(in);
    auto& list = idx.postings_[term];
    list.resize(len);
    for (uint64_t i = 0; i < len; ++i) {
      list[i].passage_id = static_cast<int64_t>(read_u64(in));
      list[i].term_freq = static_cast<int32_t>(read_u32(in));
    }
  }
  idx.avgdl_ = n == 0 ? 0.0 : static_cast<double>(total_len) / static_cast<double>(n);
  return idx;
}

InvertedIndex InvertedIndex::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open index file: " + path.string());
  return load(in);
}

std::string InvertedIndex::config_digest() const {
  Digest d;
  d.update("bm25").sep();
  std::ostringstream params;
  params.precision(17);
  params << params_.k1 << "," << params_.b;
  d.update(params.str()).sep();
  d.update(tokenizer_id_);
  return d.hex();
}

}  // namespace ragbench

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ragbench/corpus.hpp"

namespace ragbench {

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

struct Posting {
  int64_t passage_id = 0;
  int32_t term_freq = 0;
};

struct IndexStats {
  size_t passage_count = 0;
  size_t term_count = 0;
  double avg_doc_length = 0.0;
};

/// Term -> posting lists over a fixed corpus, scored with BM25.
/// Immutable after build; safe for unlimited concurrent readers.
class InvertedIndex {
 public:
  static InvertedIndex build(const Corpus& corpus, Bm25Params params = {});

  /// Top-k passages by BM25 score, ties broken by ascending passage id.
  /// Passages with no overlapping query term are excluded, so every
  /// returned score is > 0. Pure function of (index, query, k).
  std::vector<Passage> search(const std::string& query, int k) const;

  const std::string& fingerprint() const { return fingerprint_; }
  const Bm25Params& params() const { return params_; }
  const std::string& tokenizer_id() const { return tokenizer_id_; }
  IndexStats stats() const;

  const std::vector<Passage>& passages() const { return passages_; }
  const std::map<std::string, std::vector<Posting>>& postings() const {
    return postings_;
  }
  const std::vector<int32_t>& doc_lengths() const { return doc_lengths_; }
  double avg_doc_length() const { return avgdl_; }

  // Byte-exact round-trip: save(load(save(x))) == save(x).
  void save(std::ostream& out) const;
  void save_file(const std::filesystem::path& path) const;
  static InvertedIndex load(std::istream& in);
  static InvertedIndex load_file(const std::filesystem::path& path);

  /// Digest of everything that shapes retrieval behavior other than the
  /// corpus itself: scoring family, BM25 parameters, tokenizer.
  std::string config_digest() const;

 private:
  InvertedIndex() = default;

  std::vector<Passage> passages_;
  std::map<std::string, std::vector<Posting>> postings_;
  std::vector<int32_t> doc_lengths_;
  double avgdl_ = 0.0;
  Bm25Params params_;
  std::string tokenizer_id_;
  std::string fingerprint_;
};

}  // namespace ragbench

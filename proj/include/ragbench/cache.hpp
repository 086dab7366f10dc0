#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ragbench/retriever.hpp"

namespace ragbench {

/// Identity of one cached retrieval: normalized query + k + corpus
/// fingerprint + retriever config digest. Equal keys iff all four equal.
struct CacheKey {
  std::string normalized_query;
  int k = 0;
  std::string corpus_fingerprint;
  std::string config_digest;

  bool operator<(const CacheKey& o) const;
  bool operator==(const CacheKey& o) const;
};

CacheKey make_cache_key(const std::string& raw_query, int k,
                        const std::string& corpus_fingerprint,
                        const std::string& config_digest);

struct CacheStats {
  uint64_t total_queries = 0;
  uint64_t cache_hits = 0;
  uint64_t cache_misses = 0;
  uint64_t write_warnings = 0;
};

/// Query cache in front of any Retriever. Hits return the stored passages
/// byte-identically and never reach the inner retriever; concurrent
/// identical misses collapse into a single inner search (one stored entry,
/// all callers see the same result). Optionally journals entries to an
/// append-only JSONL file replayed on construction and compacted by
/// persist().
class CachingRetriever : public Retriever {
 public:
  /// max_entries == 0 means unbounded (default); otherwise LRU eviction.
  CachingRetriever(std::shared_ptr<Retriever> inner,
                   std::filesystem::path journal_path = {},
                   size_t max_entries = 0);

  SearchResult search(const std::string& query, int k) override;
  std::string corpus_fingerprint() const override {
    return inner_->corpus_fingerprint();
  }
  std::string config_digest() const override { return inner_->config_digest(); }

  /// Rewrites the journal as one line per live entry (compaction).
  void persist();

  CacheStats stats() const;
  size_t entry_count() const;
  /// Non-empty when the journal on disk was unusable at startup.
  const std::string& load_warning() const { return load_warning_; }

 private:
  struct Entry {
    std::vector<Passage> passages;
    int64_t created_at = 0;
    std::list<CacheKey>::iterator lru_pos;
  };

  void append_journal_line(const CacheKey& key, const Entry& entry);
  void store_locked(const CacheKey& key, Entry entry);
  void load_journal();

  std::shared_ptr<Retriever> inner_;
  std::filesystem::path journal_path_;
  size_t max_entries_;

  mutable std::mutex mu_;
  std::map<CacheKey, Entry> entries_;
  std::list<CacheKey> lru_;  // front = most recent
  std::map<CacheKey, std::shared_future<std::vector<Passage>>> inflight_;
  std::ofstream journal_;
  std::string load_warning_;

  std::atomic<uint64_t> total_{0};
  std::atomic<uint64_t> hits_{0};
  std::atomic<uint64_t> misses_{0};
  std::atomic<uint64_t> write_warnings_{0};
};

}  // namespace ragbench

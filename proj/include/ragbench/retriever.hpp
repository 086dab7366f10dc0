#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "ragbench/corpus.hpp"
#include "ragbench/index.hpp"

namespace ragbench {

struct SearchResult {
  std::vector<Passage> passages;
  bool cache_hit = false;
};

/// The single retrieval interface every algorithm talks to; local indexes,
/// the caching layer and the HTTP client all sit behind it.
class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual SearchResult search(const std::string& query, int k) = 0;
  virtual std::string corpus_fingerprint() const = 0;
  virtual std::string config_digest() const = 0;
};

/// Direct index-backed retriever. Counts search invocations so cache
/// transparency is observable in tests.
class IndexRetriever : public Retriever {
 public:
  explicit IndexRetriever(std::shared_ptr<const InvertedIndex> index)
      : index_(std::move(index)) {}

  SearchResult search(const std::string& query, int k) override {
    ++search_calls_;
    return {index_->search(query, k), false};
  }
  std::string corpus_fingerprint() const override { return index_->fingerprint(); }
  std::string config_digest() const override { return index_->config_digest(); }

  size_t search_calls() const { return search_calls_.load(); }
  const InvertedIndex& index() const { return *index_; }

 private:
  std::shared_ptr<const InvertedIndex> index_;
  std::atomic<size_t> search_calls_{0};
};

}  // namespace ragbench

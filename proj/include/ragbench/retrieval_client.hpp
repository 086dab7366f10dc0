#pragma once

#include <mutex>
#include <string>

#include "ragbench/openai_client.hpp"
#include "ragbench/retriever.hpp"

namespace ragbench {

/// Retriever backed by a remote retrieval service. Safe for concurrent use;
/// transient transport failures retry idempotently with exponential backoff.
class HttpRetrieverClient : public Retriever {
 public:
  explicit HttpRetrieverClient(std::string endpoint, RetryPolicy retry = {});

  SearchResult search(const std::string& query, int k) override;
  std::string corpus_fingerprint() const override;
  std::string config_digest() const override;

 private:
  void fetch_health() const;

  std::string endpoint_;
  RetryPolicy retry_;

  mutable std::mutex mu_;
  mutable std::string corpus_fingerprint_;
  mutable std::string config_digest_;
};

}  // namespace ragbench

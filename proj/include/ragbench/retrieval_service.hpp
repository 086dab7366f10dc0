#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ragbench/cache.hpp"
#include "ragbench/retriever.hpp"

namespace httplib {
class Server;
}

namespace ragbench {

/// HTTP JSON facade over a CachingRetriever so many concurrent evaluation
/// runs share one loaded index. Endpoints:
///   POST /search {"query": str, "k": int} ->
///        {"passages": [...], "cache_hit": bool}
///   GET /health -> {"status": "ok", "corpus_fingerprint": hex, ...}
///   GET /stats  -> query/hit/miss counters and latency percentiles
class RetrievalServer {
 public:
  /// Loads the cache journal (if any), binds host:port and serves on a
  /// background thread. Throws ConfigError when the port cannot be bound.
  RetrievalServer(std::shared_ptr<const InvertedIndex> index,
                  const std::string& host, int port,
                  std::filesystem::path cache_path = {},
                  size_t cache_max_entries = 0);
  ~RetrievalServer();

  RetrievalServer(const RetrievalServer&) = delete;
  RetrievalServer& operator=(const RetrievalServer&) = delete;

  /// Stops serving and persists the cache journal. Idempotent.
  void shutdown();

  int port() const { return port_; }
  std::string base_url() const;
  CachingRetriever& cache() { return *cache_; }
  const IndexRetriever& index_retriever() const { return *index_retriever_; }

 private:
  void record_latency(double ms);

  std::shared_ptr<IndexRetriever> index_retriever_;
  std::shared_ptr<CachingRetriever> cache_;
  std::unique_ptr<httplib::Server> server_;
  std::thread serve_thread_;
  std::string host_;
  int port_ = 0;
  bool stopped_ = false;

  std::mutex latency_mu_;
  std::vector<double> latencies_ms_;
};

}  // namespace ragbench

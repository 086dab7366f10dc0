#include "ragbench/retrieval_service.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ragbench/errors.hpp"
#include "ragbench/json_io.hpp"

namespace ragbench {

using nlohmann::json;

RetrievalServer::RetrievalServer(std::shared_ptr<const InvertedIndex> index,
                                 const std::string& host, int port,
                                 std::filesystem::path cache_path,
                                 size_t cache_max_entries)
    : index_retriever_(std::make_shared<IndexRetriever>(std::move(index))),
      cache_(std::make_shared<CachingRetriever>(index_retriever_,
                                                std::move(cache_path),
                                                cache_max_entries)),
      server_(std::make_unique<httplib::Server>()),
      host_(host) {
  if (!cache_->load_warning().empty()) {
    std::cerr << "warning: " << cache_->load_warning() << "\n";
  }

  // Benchmark fan-out routinely runs dozens of concurrent clients; size the
  // worker pool for that instead of httplib's core-count default.
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };

  server_->Post("/search", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    const auto start = std::chrono::steady_clock::now();
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", std::string("invalid JSON body: ") + e.what()}}.dump(),
                      "application/json");
      return;
    }
    if (!body.contains("query") || !body["query"].is_string()) {
      res.status = 400;
      res.set_content(json{{"error", "missing string field 'query'"}}.dump(),
                      "application/json");
      return;
    }
    int k = 10;
    if (body.contains("k")) {
      if (!body["k"].is_number_integer() || body["k"].get<int>() < 1) {
        res.status = 400;
        res.set_content(json{{"error", "field 'k' must be a positive integer"}}.dump(),
                        "application/json");
        return;
      }
      k = body["k"].get<int>();
    }
    try {
      SearchResult result = cache_->search(body["query"].get<std::string>(), k);
      json reply{{"passages", result.passages}, {"cache_hit", result.cache_hit}};
      res.set_content(reply.dump(), "application/json");
    } catch (const Error& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
    const auto end = std::chrono::steady_clock::now();
    record_latency(std::chrono::duration<double, std::milli>(end - start).count());
  });

  server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    json reply{{"status", "ok"},
               {"corpus_fingerprint", cache_->corpus_fingerprint()},
               {"config_digest", cache_->config_digest()}};
    res.set_content(reply.dump(), "application/json");
  });

  server_->Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
    CacheStats stats = cache_->stats();
    json latency = json::object();
    {
      std::lock_guard<std::mutex> lock(latency_mu_);
      std::vector<double> sorted = latencies_ms_;
      std::sort(sorted.begin(), sorted.end());
      latency["count"] = sorted.size();
      if (!sorted.empty()) {
        auto pct = [&](double q) {
          size_t idx = static_cast<size_t>(q * static_cast<double>(sorted.size() - 1));
          return sorted[idx];
        };
        latency["p50_ms"] = pct(0.50);
        latency["p99_ms"] = pct(0.99);
        latency["max_ms"] = sorted.back();
      }
    }
    json reply{{"total_queries", stats.total_queries},
               {"cache_hits", stats.cache_hits},
               {"cache_misses", stats.cache_misses},
               {"cache_entries", cache_->entry_count()},
               {"index_search_calls", index_retriever_->search_calls()},
               {"latency", latency}};
    res.set_content(reply.dump(), "application/json");
  });

  if (port == 0) {
    port_ = server_->bind_to_any_port(host_);
    if (port_ <= 0) {
      throw ConfigError("cannot bind retrieval service to " + host_);
    }
  } else {
    if (!server_->bind_to_port(host_, port)) {
      throw ConfigError("cannot bind retrieval service to " + host_ + ":" +
                        std::to_string(port) + " (port in use?)");
    }
    port_ = port;
  }
  serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

RetrievalServer::~RetrievalServer() { shutdown(); }

void RetrievalServer::shutdown() {
  if (stopped_) return;
  stopped_ = true;
  server_->stop();
  if (serve_thread_.joinable()) serve_thread_.join();
  cache_->persist();
}

std::string RetrievalServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

void RetrievalServer::record_latency(double ms) {
  std::lock_guard<std::mutex> lock(latency_mu_);
  latencies_ms_.push_back(ms);
}

}  // namespace ragbench

#include "ragbench/retrieval_client.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ragbench/errors.hpp"
#include "ragbench/json_io.hpp"

namespace ragbench {

using nlohmann::json;

namespace {

httplib::Result post_with_retries(const std::string& endpoint,
                                  const std::string& path,
                                  const std::string& payload,
                                  const RetryPolicy& retry,
                                  std::string& last_error) {
  httplib::Result res;
  int backoff = retry.initial_backoff_ms;
  for (int attempt = 0; attempt < retry.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client client(endpoint);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    res = client.Post(path, payload, "application/json");
    if (res) return res;
    last_error = httplib::to_string(res.error());
  }
  return res;
}

}  // namespace

HttpRetrieverClient::HttpRetrieverClient(std::string endpoint, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), retry_(retry) {
  // Normalize: no trailing slash.
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
}

SearchResult HttpRetrieverClient::search(const std::string& query, int k) {
  json body{{"query", query}, {"k", k}};
  std::string last_error;
  auto res = post_with_retries(endpoint_, "/search", body.dump(), retry_, last_error);
  if (!res) {
    throw TransportError("retrieval service " + endpoint_ +
                         " unreachable after " + std::to_string(retry_.attempts) +
                         " attempts: " + last_error);
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProtocolError("retrieval service returned HTTP " +
                        std::to_string(res->status) + ": " + res->body);
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("retrieval response is not JSON: ") + e.what());
  }
  if (!reply.contains("passages") || !reply["passages"].is_array()) {
    throw ProtocolError("retrieval response missing field 'passages'");
  }
  SearchResult out;
  try {
    out.passages = reply["passages"].get<std::vector<Passage>>();
  } catch (const json::exception&) {
    throw ProtocolError("retrieval response field 'passages' is malformed "
                        "(need id/title/text/score per passage)");
  }
  if (reply.contains("cache_hit") && reply["cache_hit"].is_boolean()) {
    out.cache_hit = reply["cache_hit"].get<bool>();
  }
  return out;
}

void HttpRetrieverClient::fetch_health() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!corpus_fingerprint_.empty()) return;
  std::string last_error;
  httplib::Result res;
  int backoff = retry_.initial_backoff_ms;
  for (int attempt = 0; attempt < retry_.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client client(endpoint_);
    client.set_connection_timeout(10);
    res = client.Get("/health");
    if (res) break;
    last_error = httplib::to_string(res.error());
  }
  if (!res) {
    throw TransportError("retrieval service " + endpoint_ +
                         " health check failed: " + last_error);
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("health response is not JSON: ") + e.what());
  }
  if (!reply.contains("corpus_fingerprint")) {
    throw ProtocolError("health response missing field 'corpus_fingerprint'");
  }
  corpus_fingerprint_ = reply["corpus_fingerprint"].get<std::string>();
  config_digest_ = reply.value("config_digest", "");
}

std::string HttpRetrieverClient::corpus_fingerprint() const {
  fetch_health();
  std::lock_guard<std::mutex> lock(mu_);
  return corpus_fingerprint_;
}

std::string HttpRetrieverClient::config_digest() const {
  fetch_health();
  std::lock_guard<std::mutex> lock(mu_);
  return config_digest_;
}

}  // namespace ragbench

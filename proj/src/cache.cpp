#include "ragbench/cache.hpp"

#include <chrono>
#include <iostream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "ragbench/json_io.hpp"
#include "ragbench/util.hpp"

namespace ragbench {

using nlohmann::json;

bool CacheKey::operator<(const CacheKey& o) const {
  return std::tie(normalized_query, k, corpus_fingerprint, config_digest) <
         std::tie(o.normalized_query, o.k, o.corpus_fingerprint, o.config_digest);
}

bool CacheKey::operator==(const CacheKey& o) const {
  return std::tie(normalized_query, k, corpus_fingerprint, config_digest) ==
         std::tie(o.normalized_query, o.k, o.corpus_fingerprint, o.config_digest);
}

CacheKey make_cache_key(const std::string& raw_query, int k,
                        const std::string& corpus_fingerprint,
                        const std::string& config_digest) {
  return {normalize_query(raw_query), k, corpus_fingerprint, config_digest};
}

namespace {

int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json entry_to_json(const CacheKey& key, const std::vector<Passage>& passages,
                   int64_t created_at) {
  return json{{"created_at", created_at},
              {"key",
               {{"q", key.normalized_query},
                {"k", key.k},
                {"fp", key.corpus_fingerprint},
                {"cfg", key.config_digest}}},
              {"passages", passages}};
}

}  // namespace

CachingRetriever::CachingRetriever(std::shared_ptr<Retriever> inner,
                                   std::filesystem::path journal_path,
                                   size_t max_entries)
    : inner_(std::move(inner)),
      journal_path_(std::move(journal_path)),
      max_entries_(max_entries) {
  if (!journal_path_.empty()) {
    load_journal();
    journal_.open(journal_path_, std::ios::app);
    if (!journal_) {
      load_warning_ += (load_warning_.empty() ? "" : "; ");
      load_warning_ += "cannot open cache journal for writing: " +
                       journal_path_.string();
    }
  }
}

void CachingRetriever::load_journal() {
  std::ifstream in(journal_path_);
  if (!in) return;  // no journal yet

  const std::string fp = inner_->corpus_fingerprint();
  const std::string cfg = inner_->config_digest();
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  for (size_t i = 0; i < lines.size(); ++i) {
    json rec;
    try {
      rec = json::parse(lines[i]);
      CacheKey key{rec.at("key").at("q").get<std::string>(),
                   rec.at("key").at("k").get<int>(),
                   rec.at("key").at("fp").get<std::string>(),
                   rec.at("key").at("cfg").get<std::string>()};
      if (key.corpus_fingerprint != fp || key.config_digest != cfg) {
        continue;  // stale entry for another corpus/config
      }
      Entry entry;
      entry.passages = rec.at("passages").get<std::vector<Passage>>();
      entry.created_at = rec.value("created_at", int64_t{0});
      store_locked(key, std::move(entry));
    } catch (const json::exception& e) {
      if (i + 1 == lines.size()) {
        // Truncated trailing line: the normal crash artifact. Keep the rest.
        load_warning_ = "dropped truncated trailing journal line in " +
                        journal_path_.string();
      } else {
        entries_.clear();
        lru_.clear();
        load_warning_ = "corrupt cache journal " + journal_path_.string() +
                        " (line " + std::to_string(i + 1) + ": " + e.what() +
                        "); starting with empty cache";
      }
      break;
    }
  }
}

void CachingRetriever::append_journal_line(const CacheKey& key,
                                           const Entry& entry) {
  if (!journal_.is_open()) return;
  journal_ << entry_to_json(key, entry.passages, entry.created_at).dump()
           << "\n";
  journal_.flush();
  if (!journal_) {
    ++write_warnings_;
    std::cerr << "warning: cache journal write failed: "
              << journal_path_.string() << "\n";
    journal_.clear();
  }
}

void CachingRetriever::store_locked(const CacheKey& key, Entry entry) {
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    lru_.erase(it->second.lru_pos);
    entries_.erase(it);
  }
  lru_.push_front(key);
  entry.lru_pos = lru_.begin();
  entries_.emplace(key, std::move(entry));
  if (max_entries_ > 0 && entries_.size() > max_entries_) {
    entries_.erase(lru_.back());
    lru_.pop_back();
  }
}

SearchResult CachingRetriever::search(const std::string& query, int k) {
  const CacheKey key = make_cache_key(query, k, inner_->corpus_fingerprint(),
                                      inner_->config_digest());
  ++total_;
  std::unique_lock<std::mutex> lock(mu_);

  auto it = entries_.find(key);
  if (it != entries_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second.lru_pos);
    it->second.lru_pos = lru_.begin();
    ++hits_;
    return {it->second.passages, true};
  }

  auto inflight_it = inflight_.find(key);
  if (inflight_it != inflight_.end()) {
    // Another caller is already computing this key; wait for its result.
    auto future = inflight_it->second;
    lock.unlock();
    try {
      auto passages = future.get();
      ++hits_;
      return {std::move(passages), true};
    } catch (...) {
      ++misses_;
      throw;
    }
  }

  std::promise<std::vector<Passage>> promise;
  inflight_.emplace(key, promise.get_future().share());
  lock.unlock();
  ++misses_;

  try {
    SearchResult inner_result = inner_->search(query, k);
    Entry entry;
    entry.passages = inner_result.passages;
    entry.created_at = now_seconds();
    {
      std::lock_guard<std::mutex> relock(mu_);
      append_journal_line(key, entry);
      store_locked(key, std::move(entry));
      inflight_.erase(key);
    }
    promise.set_value(inner_result.passages);
    return {std::move(inner_result.passages), false};
  } catch (...) {
    {
      std::lock_guard<std::mutex> relock(mu_);
      inflight_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

void CachingRetriever::persist() {
  if (journal_path_.empty()) return;
  std::lock_guard<std::mutex> lock(mu_);
  std::filesystem::path tmp = journal_path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      ++write_warnings_;
      std::cerr << "warning: cannot compact cache journal to " << tmp.string()
                << "\n";
      return;
    }
    for (const auto& [key, entry] : entries_) {
      out << entry_to_json(key, entry.passages, entry.created_at).dump() << "\n";
    }
  }
  if (journal_.is_open()) journal_.close();
  std::error_code ec;
  std::filesystem::rename(tmp, journal_path_, ec);
  if (ec) {
    ++write_warnings_;
    std::cerr << "warning: cache journal compaction rename failed: "
              << ec.message() << "\n";
  }
  journal_.open(journal_path_, std::ios::app);
}

CacheStats CachingRetriever::stats() const {
  return {total_.load(), hits_.load(), misses_.load(), write_warnings_.load()};
}

size_t CachingRetriever::entry_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

}  // namespace ragbench

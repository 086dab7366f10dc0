#pragma once

#include <map>
#include <string>

#include "ragbench/generator.hpp"

namespace ragbench {

struct Endpoint {
  std::string name;
  std::string base_url;  // e.g. http://127.0.0.1:8000
  std::string model;
  std::string api_key_env;  // env var holding the key; empty = no auth header
  std::string completions_path = "/v1/completions";
};

/// Named generator endpoints plus role -> endpoint assignment. Every role an
/// algorithm references must resolve to exactly one endpoint.
class EndpointPool {
 public:
  void add(Endpoint ep);
  void assign_role(const std::string& role, const std::string& endpoint_name);
  const Endpoint& resolve(const std::string& role) const;
  bool empty() const { return endpoints_.empty(); }

 private:
  std::map<std::string, Endpoint> endpoints_;
  std::map<std::string, std::string> roles_;
};

struct RetryPolicy {
  int attempts = 3;
  int initial_backoff_ms = 100;  // doubles per attempt
};

/// Completion client over the OpenAI-compatible wire subset
/// (prompt, max_tokens, temperature, seed, logprobs, stop).
class OpenAiGenerator : public Generator {
 public:
  explicit OpenAiGenerator(Endpoint endpoint, RetryPolicy retry = {});

  GenerationOutput complete(const std::string& prompt,
                            const GenParams& params) override;
  std::string id() const override;

 private:
  Endpoint endpoint_;
  RetryPolicy retry_;
};

}  // namespace ragbench

#include "ragbench/openai_client.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ragbench/errors.hpp"

namespace ragbench {

using nlohmann::json;

void EndpointPool::add(Endpoint ep) {
  if (ep.name.empty()) throw ConfigError("endpoint needs a name");
  if (endpoints_.count(ep.name)) {
    throw ConfigError("duplicate endpoint name: " + ep.name);
  }
  endpoints_.emplace(ep.name, std::move(ep));
}

void EndpointPool::assign_role(const std::string& role,
                               const std::string& endpoint_name) {
  if (!endpoints_.count(endpoint_name)) {
    throw ConfigError("role '" + role + "' references unknown endpoint '" +
                      endpoint_name + "'");
  }
  roles_[role] = endpoint_name;
}

const Endpoint& EndpointPool::resolve(const std::string& role) const {
  auto rit = roles_.find(role);
  if (rit == roles_.end()) {
    // A single endpoint serves any role that was never assigned explicitly.
    if (roles_.empty() && endpoints_.size() == 1) {
      return endpoints_.begin()->second;
    }
    throw ConfigError("no endpoint assigned to role '" + role + "'");
  }
  return endpoints_.at(rit->second);
}

OpenAiGenerator::OpenAiGenerator(Endpoint endpoint, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), retry_(retry) {}

std::string OpenAiGenerator::id() const {
  return "openai:" + endpoint_.base_url + endpoint_.completions_path + ":" +
         endpoint_.model;
}

GenerationOutput OpenAiGenerator::complete(const std::string& prompt,
                                           const GenParams& params) {
  if (prompt.empty()) throw ConfigError("completion prompt must be non-empty");

  json body = {
      {"model", endpoint_.model},
      {"prompt", prompt},
      {"max_tokens", params.max_new_tokens},
      {"temperature", params.temperature},
      {"seed", params.seed},
      {"echo", false},
  };
  if (params.logprobs_top_k > 0) body["logprobs"] = params.logprobs_top_k;
  if (!params.stop.empty()) body["stop"] = params.stop;

  httplib::Headers headers;
  if (!endpoint_.api_key_env.empty()) {
    const char* key = std::getenv(endpoint_.api_key_env.c_str());
    if (key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  std::string payload = body.dump();
  httplib::Result res;
  std::string last_transport_error;
  int backoff = retry_.initial_backoff_ms;
  for (int attempt = 0; attempt < retry_.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client client(endpoint_.base_url);
    client.set_connection_timeout(10);
    client.set_read_timeout(300);
    res = client.Post(endpoint_.completions_path, headers, payload,
                      "application/json");
    if (res) break;
    last_transport_error = httplib::to_string(res.error());
  }
  if (!res) {
    throw TransportError("completion request to " + endpoint_.base_url +
                         " failed after " + std::to_string(retry_.attempts) +
                         " attempts: " + last_transport_error);
  }
  if (res->status < 200 || res->status >= 300) {
    std::string detail = res->body;
    try {
      json err = json::parse(res->body);
      if (err.contains("error") && err["error"].contains("message")) {
        detail = err["error"]["message"].get<std::string>();
      }
    } catch (const json::exception&) {
      // keep raw body
    }
    throw BackendError("completion backend returned HTTP " +
                       std::to_string(res->status) + ": " + detail);
  }

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("completion response is not JSON: ") +
                        e.what());
  }
  if (!reply.contains("choices") || !reply["choices"].is_array() ||
      reply["choices"].empty()) {
    throw ProtocolError("completion response missing field 'choices'");
  }
  const json& choice = reply["choices"][0];
  if (!choice.contains("text") || !choice["text"].is_string()) {
    throw ProtocolError("completion response missing field 'choices[0].text'");
  }

  GenerationOutput out;
  out.text = choice["text"].get<std::string>();
  std::string finish = choice.value("finish_reason", "stop");
  out.finish = finish == "length" ? FinishReason::length : FinishReason::stop;

  const bool want_logprobs = params.logprobs_top_k > 0;
  if (choice.contains("logprobs") && !choice["logprobs"].is_null()) {
    const json& lp = choice["logprobs"];
    if (!lp.contains("tokens") || !lp["tokens"].is_array()) {
      throw ProtocolError("completion response missing field 'logprobs.tokens'");
    }
    const json& tokens = lp["tokens"];
    const json token_lps = lp.value("token_logprobs", json::array());
    const json top_lps = lp.value("top_logprobs", json::array());
    for (size_t i = 0; i < tokens.size(); ++i) {
      TokenLogprob tok;
      tok.token = tokens[i].get<std::string>();
      if (i < token_lps.size() && !token_lps[i].is_null()) {
        tok.logprob = token_lps[i].get<double>();
      }
      if (i < top_lps.size() && top_lps[i].is_object()) {
        for (const auto& [alt, alt_lp] : top_lps[i].items()) {
          tok.top.emplace_back(alt, alt_lp.get<double>());
        }
        std::sort(tok.top.begin(), tok.top.end(),
                  [](const auto& a, const auto& b) {
                    if (a.second != b.second) return a.second > b.second;
                    return a.first < b.first;
                  });
      }
      out.tokens.push_back(std::move(tok));
    }
  } else if (want_logprobs) {
    throw CapabilityError("backend at " + endpoint_.base_url +
                          " returned no logprobs though logprobs_top_k=" +
                          std::to_string(params.logprobs_top_k) +
                          " was requested");
  }
  return out;
}

}  // namespace ragbench

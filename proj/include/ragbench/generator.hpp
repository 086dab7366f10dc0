#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ragbench {

struct GenParams {
  int max_new_tokens = 300;
  double temperature = 0.0;  // 0 = greedy
  int64_t seed = 42;
  int logprobs_top_k = 0;
  std::vector<std::string> stop;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;  // <= 0
  // Alternatives sorted by logprob descending, length <= logprobs_top_k.
  std::vector<std::pair<std::string, double>> top;
};

enum class FinishReason { stop, length };

const char* finish_reason_name(FinishReason r);

struct GenerationOutput {
  std::string text;
  std::vector<TokenLogprob> tokens;
  FinishReason finish = FinishReason::stop;
};

/// Backend-transparent generator interface. Algorithms observe only
/// GenerationOutput; scripted and HTTP backends are interchangeable.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual GenerationOutput complete(const std::string& prompt,
                                    const GenParams& params) = 0;
  /// Stable identity for the alignment fingerprint.
  virtual std::string id() const = 0;
  /// Whether the backend can attach per-token logprobs when asked. Callers
  /// that need them (confidence-triggered retrieval) fail fast when false.
  virtual bool supports_logprobs() const { return true; }
};

inline constexpr double kFloorProbability = 1e-10;

/// exp(logprob) for each candidate token read from the top-alternatives
/// list at `position`. A candidate equal to the sampled token falls back to
/// that token's own logprob; anything else absent gets the 1e-10 floor.
/// Throws std::out_of_range when position is outside the token list.
std::vector<double> candidate_probability(const GenerationOutput& output,
                                          size_t position,
                                          const std::vector<std::string>& candidates);

/// Same, normalized to sum to 1 over the candidate set.
std::vector<double> candidate_distribution(const GenerationOutput& output,
                                           size_t position,
                                           const std::vector<std::string>& candidates);

/// Builds a scripted-style output whose token texts concatenate byte-exactly
/// to `text` (whitespace attaches to the following token), each with
/// probability 1 and itself as sole alternative.
GenerationOutput make_output(const std::string& text,
                             FinishReason finish = FinishReason::stop);

}  // namespace ragbench

#include "ragbench/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "ragbench/util.hpp"

namespace ragbench {
namespace {

// Lowercase + strip punctuation, the stage shared by both tokenizations.
std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (std::ispunct(c)) continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

bool is_article(std::string_view token) {
  return token == "a" || token == "an" || token == "the";
}

double lcs_length(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  std::vector<size_t> row(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = 0;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return static_cast<double>(row[b.size()]);
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  for (const auto& token : split_whitespace(fold(text))) {
    if (is_article(token)) continue;
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

std::vector<std::string> metric_tokens(std::string_view text) {
  return split_whitespace(fold(text));
}

double metric_accuracy(const std::string& answer,
                       const std::vector<std::string>& golds) {
  std::string norm = normalize_text(answer);
  for (const auto& gold : golds) {
    if (norm.find(normalize_text(gold)) != std::string::npos) return 1.0;
  }
  return 0.0;
}

double metric_em(const std::string& answer,
                 const std::vector<std::string>& golds) {
  std::string norm = normalize_text(answer);
  for (const auto& gold : golds) {
    if (norm == normalize_text(gold)) return 1.0;
  }
  return 0.0;
}

double metric_f1_single(const std::string& answer, const std::string& gold) {
  std::vector<std::string> pred = metric_tokens(answer);
  std::vector<std::string> ref = metric_tokens(gold);
  if (pred.empty() || ref.empty()) {
    return pred.empty() && ref.empty() ? 1.0 : 0.0;
  }
  std::map<std::string, size_t> counts;
  for (const auto& t : pred) ++counts[t];
  size_t overlap = 0;
  for (const auto& t : ref) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  double precision = static_cast<double>(overlap) / pred.size();
  double recall = static_cast<double>(overlap) / ref.size();
  return 2.0 * precision * recall / (precision + recall);
}

double metric_f1(const std::string& answer,
                 const std::vector<std::string>& golds) {
  double best = 0.0;
  for (const auto& gold : golds) {
    best = std::max(best, metric_f1_single(answer, gold));
  }
  return best;
}

double metric_rouge_l(const std::string& answer, const std::string& reference) {
  std::vector<std::string> pred = metric_tokens(answer);
  std::vector<std::string> ref = metric_tokens(reference);
  if (pred.empty() || ref.empty()) {
    return pred.empty() && ref.empty() ? 1.0 : 0.0;
  }
  double lcs = lcs_length(pred, ref);
  if (lcs == 0.0) return 0.0;
  double precision = lcs / pred.size();
  double recall = lcs / ref.size();
  return 2.0 * precision * recall / (precision + recall);
}

double metric_str_em(
    const std::string& answer,
    const std::vector<std::vector<std::string>>& short_answer_sets) {
  if (short_answer_sets.empty()) {
    throw std::invalid_argument(
        "str-em needs at least one required short-answer set");
  }
  std::string norm = normalize_text(answer);
  size_t covered = 0;
  for (const auto& aliases : short_answer_sets) {
    for (const auto& alias : aliases) {
      if (norm.find(normalize_text(alias)) != std::string::npos) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / short_answer_sets.size();
}

double metric_str_hit(
    const std::string& answer,
    const std::vector<std::vector<std::string>>& short_answer_sets) {
  return metric_str_em(answer, short_answer_sets) == 1.0 ? 1.0 : 0.0;
}

}  // namespace ragbench

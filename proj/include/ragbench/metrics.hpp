#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ragbench {

/// Shared answer normalization: lowercase, strip (ASCII) punctuation, drop
/// the articles a/an/the, collapse whitespace. Used by accuracy, EM and the
/// short-answer coverage metrics.
std::string normalize_text(std::string_view text);

/// Token stream for the overlap metrics (F1, ROUGE-L): lowercase, strip
/// punctuation, split on whitespace — articles are kept, so "the cat sat"
/// yields three tokens.
std::vector<std::string> metric_tokens(std::string_view text);

/// 1 iff any normalized gold occurs as a substring of the normalized answer
/// (cover match).
double metric_accuracy(const std::string& answer,
                       const std::vector<std::string>& golds);

/// 1 iff the normalized answer equals any normalized gold.
double metric_em(const std::string& answer,
                 const std::vector<std::string>& golds);

/// Token-multiset F1 against one gold; 1 when both sides normalize to
/// nothing, 0 when exactly one does.
double metric_f1_single(const std::string& answer, const std::string& gold);

/// Max of metric_f1_single over the golds.
double metric_f1(const std::string& answer,
                 const std::vector<std::string>& golds);

/// LCS-based F-measure (beta = 1) on the token sequences.
double metric_rouge_l(const std::string& answer, const std::string& reference);

/// Fraction of required short answers covered: a set counts as covered when
/// any of its aliases is a substring of the answer (both normalized).
/// Throws std::invalid_argument when `short_answer_sets` is empty.
double metric_str_em(const std::string& answer,
                     const std::vector<std::vector<std::string>>& short_answer_sets);

/// 1 iff every required short answer is covered (str-em == 1).
double metric_str_hit(const std::string& answer,
                      const std::vector<std::vector<std::string>>& short_answer_sets);

}  // namespace ragbench

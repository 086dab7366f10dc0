#include "ragbench/track.hpp"

#include <sstream>

#include "ragbench/json_io.hpp"

namespace ragbench {

size_t GenerationTrack::retrieval_count() const {
  size_t n = 0;
  for (const auto& s : steps) n += std::holds_alternative<RetrievalStep>(s);
  return n;
}

size_t GenerationTrack::generation_count() const {
  size_t n = 0;
  for (const auto& s : steps) n += std::holds_alternative<GenerationStep>(s);
  return n;
}

size_t GenerationTrack::decision_count() const {
  size_t n = 0;
  for (const auto& s : steps) n += std::holds_alternative<DecisionStep>(s);
  return n;
}

size_t GenerationTrack::generated_tokens() const {
  size_t n = 0;
  for (const auto& s : steps) {
    if (const auto* g = std::get_if<GenerationStep>(&s)) {
      n += g->output.tokens.size();
    }
  }
  return n;
}

void to_json(nlohmann::json& j, const RetrievalStep& s) {
  j = nlohmann::json{{"type", "retrieval"},
                     {"query", s.query},
                     {"k", s.k},
                     {"passages", s.passages},
                     {"cache_hit", s.cache_hit}};
}

void to_json(nlohmann::json& j, const GenerationStep& s) {
  j = nlohmann::json{{"type", "generation"},
                     {"label", s.label},
                     {"prompt", s.prompt},
                     {"output", s.output}};
}

void to_json(nlohmann::json& j, const DecisionStep& s) {
  j = nlohmann::json{{"type", "decision"},
                     {"kind", s.kind},
                     {"detail", s.detail},
                     {"data", s.data}};
}

void to_json(nlohmann::json& j, const GenerationTrack& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& step : t.steps) {
    std::visit([&steps](const auto& s) { steps.push_back(s); }, step);
  }
  j = nlohmann::json{{"algorithm", t.algorithm},
                     {"query", t.query},
                     {"steps", std::move(steps)},
                     {"answer", t.answer}};
}

std::string format_track(const GenerationTrack& track) {
  std::ostringstream out;
  out << "algorithm: " << track.algorithm << "\n";
  out << "query: " << track.query << "\n";
  size_t idx = 0;
  for (const auto& step : track.steps) {
    ++idx;
    out << "--- step " << idx << " ";
    if (const auto* r = std::get_if<RetrievalStep>(&step)) {
      out << "[retrieval]\n";
      out << "query: " << r->query << " (k=" << r->k
          << (r->cache_hit ? ", cached" : "") << ")\n";
      for (size_t i = 0; i < r->passages.size(); ++i) {
        out << "  [" << (i + 1) << "] #" << r->passages[i].id << " "
            << r->passages[i].title << " (score " << r->passages[i].score
            << ")\n";
      }
    } else if (const auto* g = std::get_if<GenerationStep>(&step)) {
      out << "[generation:" << g->label << "]\n";
      out << g->output.text << "\n";
    } else if (const auto* d = std::get_if<DecisionStep>(&step)) {
      out << "[decision:" << d->kind << "]\n";
      if (!d->detail.empty()) out << d->detail << "\n";
    }
  }
  out << "--- answer\n" << track.answer << "\n";
  return out.str();
}

}  // namespace ragbench

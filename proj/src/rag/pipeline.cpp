#include "trag/rag/pipeline.hpp"

#include <unordered_map>

#include "trag/errors.hpp"

namespace trag::rag {

std::vector<RetrievedCandidate> Bm25Retriever::retrieve(std::string_view question, std::size_t n) const {
  std::vector<RetrievedCandidate> out;
  for (auto& hit : index_.search(question, n)) {
    out.push_back({hit.segment, std::move(hit.table_id), hit.score, 0.0, segments_[hit.segment].text});
  }
  return out;
}

std::vector<RetrievedCandidate> DenseRetriever::retrieve(std::string_view question, std::size_t n) const {
  const auto q = provider_.embed_query(question);
  std::vector<RetrievedCandidate> out;
  for (auto& hit : index_.knn(q, n, mode_, true)) {
    out.push_back({hit.segment, std::move(hit.table_id), hit.score, 0.0, segments_[hit.segment].text});
  }
  return out;
}

AnswerOutput answer(std::string_view question, const Retriever& retriever, const Generator& generator,
                    const AnswerOptions& options) {
  AnswerOutput out;
  out.candidates = retriever.retrieve(question, options.n_docs);
  if (out.candidates.empty()) throw NoCandidates();
  assign_priors(out.candidates, options.temperature);
  out.answers = beam_decode(question, out.candidates, generator, options.decode);
  return out;
}

AnswerOutput answer_with_gold(std::string_view question, const std::string& gold_table_id,
                              const bm25::Bm25Index& index, std::span<const corpus::Segment> segments,
                              const Generator& generator, const AnswerOptions& options) {
  std::optional<corpus::SegmentRef> chosen;
  double best = 0.0;
  try {
    for (const auto& [ref, score] : index.score_segments(question)) {
      if (segments[ref].table_id == gold_table_id && (!chosen || score > best)) {
        chosen = ref;
        best = score;
      }
    }
  } catch (const EmptyQuery&) {
  }
  if (!chosen) {
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (segments[i].table_id == gold_table_id) {
        chosen = static_cast<corpus::SegmentRef>(i);
        break;
      }
    }
  }
  if (!chosen) throw NoCandidates();
  AnswerOutput out;
  out.candidates.push_back({*chosen, gold_table_id, best, 1.0, segments[*chosen].text});
  out.answers = beam_decode(question, out.candidates, generator, options.decode);
  return out;
}

ToyGenerator memorize_gold(std::span<const corpus::QaExample> examples, std::span<const corpus::Segment> segments,
                           double smoothing) {
  std::unordered_map<std::string_view, std::vector<const corpus::Segment*>> by_table;
  for (const auto& s : segments) by_table[s.table_id].push_back(&s);
  ToyGenerator::Builder builder;
  for (const auto& ex : examples) {
    auto it = by_table.find(ex.gold_table_id);
    if (it == by_table.end()) throw MissingGold(ex.qid);
    for (const auto& answer : ex.answers) {
      bool placed = false;
      for (const auto* s : it->second) {
        if (s->body().find(answer) != std::string_view::npos) {
          builder.memorize(s->text, answer);
          placed = true;
        }
      }
      if (!placed) {
        for (const auto* s : it->second) builder.memorize(s->text, answer);
      }
    }
  }
  return builder.build(smoothing);
}

}  // namespace trag::rag

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "trag/bm25/index.hpp"
#include "trag/corpus/table.hpp"
#include "trag/dense/dense_index.hpp"
#include "trag/rag/decode.hpp"
#include "trag/rag/toy_generator.hpp"

namespace trag::rag {

/// Produces up to n candidates for a question, best first, priors unset.
class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual std::vector<RetrievedCandidate> retrieve(std::string_view question, std::size_t n) const = 0;
};

/// Table-level BM25; each table contributes its best segment.
class Bm25Retriever final : public Retriever {
 public:
  Bm25Retriever(const bm25::Bm25Index& index, std::span<const corpus::Segment> segments)
      : index_(index), segments_(segments) {}
  std::vector<RetrievedCandidate> retrieve(std::string_view question, std::size_t n) const override;

 private:
  const bm25::Bm25Index& index_;
  std::span<const corpus::Segment> segments_;
};

/// Inner-product search over segment embeddings, one segment per table.
class DenseRetriever final : public Retriever {
 public:
  DenseRetriever(const dense::DenseIndex& index, const dense::EmbeddingProvider& provider,
                 std::span<const corpus::Segment> segments, dense::SearchMode mode = dense::SearchMode::ann)
      : index_(index), provider_(provider), segments_(segments), mode_(mode) {}
  std::vector<RetrievedCandidate> retrieve(std::string_view question, std::size_t n) const override;

 private:
  const dense::DenseIndex& index_;
  const dense::EmbeddingProvider& provider_;
  std::span<const corpus::Segment> segments_;
  dense::SearchMode mode_;
};

struct AnswerOptions {
  std::size_t n_docs = 5;
  DecodeOptions decode;
  double temperature = 1.0;
};

struct AnswerOutput {
  std::vector<RetrievedCandidate> candidates;  ///< retrieval order, priors filled in
  std::vector<AnswerResult> answers;           ///< descending log_prob
};

/// Retrieve top n_docs, softmax scores into priors, beam-decode.
AnswerOutput answer(std::string_view question, const Retriever& retriever, const Generator& generator,
                    const AnswerOptions& options = {});

/// Decode with the gold table forced as the only candidate (prior 1): its
/// best BM25 segment for the question, or its first segment without a match.
AnswerOutput answer_with_gold(std::string_view question, const std::string& gold_table_id,
                              const bm25::Bm25Index& index, std::span<const corpus::Segment> segments,
                              const Generator& generator, const AnswerOptions& options = {});

/// ToyGenerator that has memorized every gold answer on the gold table's
/// segments that contain it (all gold segments when none does).
ToyGenerator memorize_gold(std::span<const corpus::QaExample> examples, std::span<const corpus::Segment> segments,
                           double smoothing = 1e-6);

}  // namespace trag::rag

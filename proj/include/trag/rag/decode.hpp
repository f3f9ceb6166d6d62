#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trag/corpus/table.hpp"
#include "trag/rag/generator.hpp"

namespace trag::rag {

/// A retrieved segment handed to the generator, with its retrieval prior p(z|q).
struct RetrievedCandidate {
  corpus::SegmentRef segment = 0;
  std::string table_id;
  double score = 0.0;  ///< raw retrieval score
  double prior = 0.0;  ///< softmax-normalized over the retrieved set
  std::string context; ///< segment text used in the prompt
};

struct AnswerResult {
  std::string text;
  std::vector<TokenId> tokens;  ///< including EOS when the beam ended on it
  double log_prob = 0.0;        ///< log of the mixture sequence probability
  std::string provenance_table_id;
  corpus::SegmentRef provenance_segment = 0;
  double provenance_score = 0.0;  ///< posterior weight of the provenance candidate
};

struct DecodeOptions {
  std::size_t beam_width = 4;
  std::size_t max_len = 32;  ///< decoding steps, EOS included
};

/// "question: <q> context: <text>"
std::string assemble_prompt(std::string_view question, std::string_view context);

/// softmax(scores / temperature), computed with the max subtracted.
std::vector<double> softmax(std::span<const double> scores, double temperature = 1.0);

/// Fills every candidate's prior from the softmax of its retrieval score.
void assign_priors(std::span<RetrievedCandidate> candidates, double temperature = 1.0);

/// p(token) = sum_z weight(z) * p(token | z). Throws LengthMismatch when the
/// counts of weights and distributions (or distribution sizes) disagree.
std::vector<double> marginalize_step(std::span<const double> weights, std::span<const std::vector<double>> dists);

/// Beam search over the retrieval mixture. Each step marginalizes the
/// per-candidate next-token distributions under the posterior p(z | q, prefix),
/// so a hypothesis' running probability is exactly
/// sum_z p(z|q) * prod_t p(y_t | q, z, y_<t). Returns up to beam_width finished
/// hypotheses (EOS or max_len reached) by descending log_prob, ties broken by
/// lexicographic token order. Throws NoCandidates, std::invalid_argument.
std::vector<AnswerResult> beam_decode(std::string_view question, std::span<const RetrievedCandidate> candidates,
                                      const Generator& generator, const DecodeOptions& options = {});

}  // namespace trag::rag

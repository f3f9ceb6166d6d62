#include "trag/rag/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "trag/errors.hpp"

namespace trag::rag {

std::string assemble_prompt(std::string_view question, std::string_view context) {
  std::string out = "question: ";
  out += question;
  out += " context: ";
  out += context;
  return out;
}

std::vector<double> softmax(std::span<const double> scores, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
  if (scores.empty()) return {};
  const double hi = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - hi) / temperature);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

void assign_priors(std::span<RetrievedCandidate> candidates, double temperature) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(c.score);
  const auto priors = softmax(scores, temperature);
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].prior = priors[i];
}

std::vector<double> marginalize_step(std::span<const double> weights, std::span<const std::vector<double>> dists) {
  if (weights.size() != dists.size()) {
    throw LengthMismatch("marginalize_step: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(dists.size()) + " distributions");
  }
  if (dists.empty()) return {};
  const std::size_t v = dists.front().size();
  std::vector<double> out(v, 0.0);
  for (std::size_t z = 0; z < dists.size(); ++z) {
    if (dists[z].size() != v) throw LengthMismatch("marginalize_step: distributions differ in size");
    for (std::size_t t = 0; t < v; ++t) out[t] += weights[z] * dists[z][t];
  }
  return out;
}

namespace {

constexpr double kRescaleBelow = 1e-200;

struct Hypothesis {
  std::vector<TokenId> tokens;
  std::vector<double> joint;  // prior(z) * p(tokens | z), scaled by exp(-log_scale)
  double log_scale = 0.0;
  double log_prob = 0.0;
  bool finished = false;
};

double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Lexicographic comparison of token strings.
bool lex_less(const Vocabulary& vocab, const std::vector<TokenId>& a, const std::vector<TokenId>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](TokenId x, TokenId y) {
    return vocab.token(x) < vocab.token(y);
  });
}

bool ranks_before(const Vocabulary& vocab, const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return lex_less(vocab, a.tokens, b.tokens);
}

Hypothesis extend(const Hypothesis& h, TokenId token, std::span<const std::vector<double>> dists) {
  Hypothesis next;
  next.tokens = h.tokens;
  next.tokens.push_back(token);
  next.joint.resize(h.joint.size());
  for (std::size_t z = 0; z < h.joint.size(); ++z) next.joint[z] = h.joint[z] * dists[z][token];
  next.log_scale = h.log_scale;
  const double hi = *std::max_element(next.joint.begin(), next.joint.end());
  if (hi > 0.0 && hi < kRescaleBelow) {
    for (double& j : next.joint) j /= hi;
    next.log_scale += std::log(hi);
  }
  next.log_prob = next.log_scale + std::log(sum_of(next.joint));
  return next;
}

}  // namespace

std::vector<AnswerResult> beam_decode(std::string_view question, std::span<const RetrievedCandidate> candidates,
                                      const Generator& generator, const DecodeOptions& options) {
  if (candidates.empty()) throw NoCandidates();
  if (options.beam_width == 0) throw std::invalid_argument("beam width must be at least 1");
  if (options.max_len == 0) throw std::invalid_argument("max_len must be at least 1");
  const auto& vocab = generator.vocab();

  std::vector<std::string> prompts;
  Hypothesis root;
  double prior_sum = 0.0;
  for (const auto& c : candidates) {
    if (!(c.prior >= 0.0)) throw std::invalid_argument("retrieval priors must be non-negative");
    prompts.push_back(assemble_prompt(question, c.context));
    root.joint.push_back(c.prior);
    prior_sum += c.prior;
  }
  if (std::abs(prior_sum - 1.0) > 1e-9) throw std::invalid_argument("retrieval priors must sum to 1");
  root.log_prob = std::log(sum_of(root.joint));

  const auto order = [&](const Hypothesis& a, const Hypothesis& b) { return ranks_before(vocab, a, b); };
  std::vector<Hypothesis> live{std::move(root)};
  std::vector<Hypothesis> finished;

  for (std::size_t step = 1; step <= options.max_len && !live.empty(); ++step) {
    std::vector<Hypothesis> expansions;
    for (const auto& h : live) {
      std::vector<std::vector<double>> dists;
      dists.reserve(candidates.size());
      for (const auto& prompt : prompts) {
        auto d = generator.next_token_dist(prompt, h.tokens);
        check_distribution(d, vocab.size());
        dists.push_back(std::move(d));
      }
      const double total = sum_of(h.joint);
      std::vector<double> posterior(h.joint.size());
      for (std::size_t z = 0; z < h.joint.size(); ++z) posterior[z] = h.joint[z] / total;
      const auto step_dist = marginalize_step(posterior, dists);

      // Only this hypothesis' best beam_width tokens can survive global pruning.
      std::vector<TokenId> ids(vocab.size());
      std::iota(ids.begin(), ids.end(), TokenId{0});
      const std::size_t keep = std::min(options.beam_width, ids.size());
      std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(keep), ids.end(),
                        [&](TokenId a, TokenId b) {
                          if (step_dist[a] != step_dist[b]) return step_dist[a] > step_dist[b];
                          return vocab.token(a) < vocab.token(b);
                        });
      for (std::size_t i = 0; i < keep; ++i) {
        if (!(step_dist[ids[i]] > 0.0)) break;
        auto next = extend(h, ids[i], dists);
        next.finished = ids[i] == vocab.eos() || step == options.max_len;
        expansions.push_back(std::move(next));
      }
    }
    const std::size_t keep = std::min(options.beam_width, expansions.size());
    std::partial_sort(expansions.begin(), expansions.begin() + static_cast<std::ptrdiff_t>(keep), expansions.end(),
                      order);
    expansions.resize(keep);

    live.clear();
    for (auto& h : expansions) (h.finished ? finished : live).push_back(std::move(h));

    // Scores never increase along a beam, so once beam_width finished
    // hypotheses beat every live one nothing can displace them.
    if (finished.size() >= options.beam_width && !live.empty()) {
      std::sort(finished.begin(), finished.end(), order);
      const auto& worst_kept = finished[options.beam_width - 1];
      const bool live_can_win = std::any_of(live.begin(), live.end(), [&](const Hypothesis& h) {
        return h.log_prob >= worst_kept.log_prob;
      });
      if (!live_can_win) live.clear();
    }
  }

  std::sort(finished.begin(), finished.end(), order);
  if (finished.size() > options.beam_width) finished.resize(options.beam_width);

  std::vector<AnswerResult> results;
  results.reserve(finished.size());
  for (const auto& h : finished) {
    AnswerResult r;
    r.text = vocab.decode(h.tokens);
    r.tokens = h.tokens;
    r.log_prob = std::min(0.0, h.log_prob);
    const auto best = static_cast<std::size_t>(std::max_element(h.joint.begin(), h.joint.end()) - h.joint.begin());
    r.provenance_table_id = candidates[best].table_id;
    r.provenance_segment = candidates[best].segment;
    r.provenance_score = h.joint[best] / sum_of(h.joint);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace trag::rag

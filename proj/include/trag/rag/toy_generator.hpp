#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "trag/rag/generator.hpp"

namespace trag::rag {

/// Deterministic test generator: a trie of answers memorized per context with
/// add-lambda smoothing over the whole vocabulary. A prompt selects the
/// longest memorized context it ends with; prompts matching no context, or
/// prefixes that leave the trie, get the uniform distribution.
class ToyGenerator final : public Generator {
 public:
  class Builder {
   public:
    /// Records one (context, answer) pair; repeats raise the count.
    Builder& memorize(std::string context, std::string answer);
    /// Extra vocabulary beyond the memorized answer tokens.
    Builder& add_tokens(const std::vector<std::string>& tokens);
    ToyGenerator build(double smoothing = 1e-6) const;

   private:
    std::vector<std::pair<std::string, std::string>> pairs_;
    std::vector<std::string> extra_;
  };

  const Vocabulary& vocab() const override { return vocab_; }
  std::vector<double> next_token_dist(std::string_view prompt, std::span<const TokenId> prefix) const override;
  double smoothing() const { return smoothing_; }

 private:
  struct Node {
    std::map<TokenId, std::uint32_t> children;
    std::uint32_t visits = 0;  // answers passing through this node
    std::uint32_t ends = 0;    // answers ending here
  };

  ToyGenerator(Vocabulary vocab, double smoothing) : vocab_(std::move(vocab)), smoothing_(smoothing) {}
  std::uint32_t root_for(std::string_view prompt) const;

  Vocabulary vocab_;
  double smoothing_;
  std::vector<Node> nodes_;
  // context length -> context -> trie root
  std::map<std::size_t, std::unordered_map<std::string, std::uint32_t>, std::greater<>> roots_;
};

}  // namespace trag::rag

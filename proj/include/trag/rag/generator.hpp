#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trag::rag {

using TokenId = std::uint32_t;

inline constexpr std::string_view kEos = "</s>";

/// Finite output vocabulary; must contain the EOS token. Ids follow the order
/// tokens were given in.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> tokens);
  /// Sorted, de-duplicated `tokens` plus EOS; ids then follow lexicographic order.
  static Vocabulary sorted(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  TokenId eos() const { return eos_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::optional<TokenId> find(std::string_view token) const;

  /// Whitespace split; throws std::invalid_argument on an out-of-vocabulary token.
  std::vector<TokenId> encode(std::string_view answer) const;
  /// Tokens joined by single spaces; EOS is dropped.
  std::string decode(std::span<const TokenId> ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId eos_ = 0;
};

std::vector<std::string> split_whitespace(std::string_view text);

/// Seq2seq generator contract: a next-token distribution over vocab() given a
/// prompt and the tokens generated so far. Every distribution is non-negative
/// and sums to 1.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual const Vocabulary& vocab() const = 0;
  virtual std::vector<double> next_token_dist(std::string_view prompt, std::span<const TokenId> prefix) const = 0;
};

/// Serializes calls into a backend that is not safe for concurrent use.
class SerializedGenerator final : public Generator {
 public:
  explicit SerializedGenerator(std::shared_ptr<const Generator> inner) : inner_(std::move(inner)) {}
  const Vocabulary& vocab() const override { return inner_->vocab(); }
  std::vector<double> next_token_dist(std::string_view prompt, std::span<const TokenId> prefix) const override;

 private:
  std::shared_ptr<const Generator> inner_;
  mutable std::mutex mu_;
};

/// Throws std::runtime_error unless `dist` has `vocab_size` finite, non-negative
/// entries summing to 1 within `tolerance`.
void check_distribution(std::span<const double> dist, std::size_t vocab_size, double tolerance = 1e-9);

}  // namespace trag::rag

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace trag::corpus {

/// Byte range [begin, end) of one token within the tokenized text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const TokenSpan&) const = default;
};

/// Token counting and split positions. Segmentation only relies on this
/// contract, so a subword tokenizer can be plugged in without touching it.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<TokenSpan> split(std::string_view text) const = 0;
  virtual std::string name() const = 0;

  std::size_t count(std::string_view text) const { return split(text).size(); }
  /// Token strings, lowercased (ASCII).
  std::vector<std::string> tokens(std::string_view text) const;
};

/// Splits on whitespace; every ASCII punctuation character is a token of its own.
/// Non-ASCII bytes are treated as word characters.
class BasicTokenizer final : public Tokenizer {
 public:
  std::vector<TokenSpan> split(std::string_view text) const override;
  std::string name() const override { return "basic"; }
};

std::shared_ptr<const Tokenizer> default_tokenizer();

}  // namespace trag::corpus

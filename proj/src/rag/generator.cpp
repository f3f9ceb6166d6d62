#include "trag/rag/generator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace trag::rag {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  bool has_eos = false;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw std::invalid_argument("duplicate vocabulary token: " + tokens_[i]);
    }
    if (tokens_[i] == kEos) {
      eos_ = static_cast<TokenId>(i);
      has_eos = true;
    }
  }
  if (!has_eos) throw std::invalid_argument("vocabulary has no EOS token");
}

Vocabulary Vocabulary::sorted(std::vector<std::string> tokens) {
  tokens.emplace_back(kEos);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return Vocabulary(std::move(tokens));
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    const auto start = i;
    while (i < text.size() && !space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::vector<TokenId> Vocabulary::encode(std::string_view answer) const {
  std::vector<TokenId> ids;
  for (const auto& t : split_whitespace(answer)) {
    auto id = find(t);
    if (!id) throw std::invalid_argument("token not in vocabulary: " + t);
    ids.push_back(*id);
  }
  return ids;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (const auto id : ids) {
    if (id == eos_) continue;
    if (!out.empty()) out += ' ';
    out += token(id);
  }
  return out;
}

std::vector<double> SerializedGenerator::next_token_dist(std::string_view prompt,
                                                         std::span<const TokenId> prefix) const {
  std::lock_guard lock(mu_);
  return inner_->next_token_dist(prompt, prefix);
}

void check_distribution(std::span<const double> dist, std::size_t vocab_size, double tolerance) {
  if (dist.size() != vocab_size) {
    throw std::runtime_error("distribution has " + std::to_string(dist.size()) + " entries, vocabulary has " +
                             std::to_string(vocab_size));
  }
  double sum = 0.0;
  for (double p : dist) {
    if (!std::isfinite(p) || p < 0.0) throw std::runtime_error("distribution has a negative or non-finite entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw std::runtime_error("distribution sums to " + std::to_string(sum));
  }
}

}  // namespace trag::rag

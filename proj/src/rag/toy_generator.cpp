#include "trag/rag/toy_generator.hpp"

#include <limits>
#include <stdexcept>

namespace trag::rag {

namespace {
constexpr std::uint32_t kNoRoot = std::numeric_limits<std::uint32_t>::max();
}

ToyGenerator::Builder& ToyGenerator::Builder::memorize(std::string context, std::string answer) {
  pairs_.emplace_back(std::move(context), std::move(answer));
  return *this;
}

ToyGenerator::Builder& ToyGenerator::Builder::add_tokens(const std::vector<std::string>& tokens) {
  extra_.insert(extra_.end(), tokens.begin(), tokens.end());
  return *this;
}

ToyGenerator ToyGenerator::Builder::build(double smoothing) const {
  if (!(smoothing > 0.0)) throw std::invalid_argument("ToyGenerator smoothing must be positive");
  std::vector<std::string> tokens = extra_;
  for (const auto& [_, answer] : pairs_) {
    for (auto& t : split_whitespace(answer)) {
      if (t == kEos) throw std::invalid_argument("answers may not contain the EOS token");
      tokens.push_back(std::move(t));
    }
  }
  ToyGenerator gen(Vocabulary::sorted(std::move(tokens)), smoothing);
  for (const auto& [context, answer] : pairs_) {
    auto& by_ctx = gen.roots_[context.size()];
    auto [it, inserted] = by_ctx.try_emplace(context, static_cast<std::uint32_t>(gen.nodes_.size()));
    if (inserted) gen.nodes_.emplace_back();
    std::uint32_t node = it->second;
    ++gen.nodes_[node].visits;
    for (const auto id : gen.vocab_.encode(answer)) {
      auto child = gen.nodes_[node].children.find(id);
      std::uint32_t next;
      if (child == gen.nodes_[node].children.end()) {
        next = static_cast<std::uint32_t>(gen.nodes_.size());
        gen.nodes_[node].children.emplace(id, next);
        gen.nodes_.emplace_back();
      } else {
        next = child->second;
      }
      node = next;
      ++gen.nodes_[node].visits;
    }
    ++gen.nodes_[node].ends;
  }
  return gen;
}

std::uint32_t ToyGenerator::root_for(std::string_view prompt) const {
  for (const auto& [len, by_ctx] : roots_) {
    if (len > prompt.size()) continue;
    auto it = by_ctx.find(std::string(prompt.substr(prompt.size() - len)));
    if (it != by_ctx.end()) return it->second;
  }
  return kNoRoot;
}

std::vector<double> ToyGenerator::next_token_dist(std::string_view prompt, std::span<const TokenId> prefix) const {
  const std::size_t v = vocab_.size();
  std::vector<double> dist(v, 1.0 / static_cast<double>(v));
  std::uint32_t node = root_for(prompt);
  if (node == kNoRoot) return dist;
  for (const auto id : prefix) {
    auto it = nodes_[node].children.find(id);
    if (it == nodes_[node].children.end()) return dist;
    node = it->second;
  }
  const auto& n = nodes_[node];
  const double total = static_cast<double>(n.visits) + smoothing_ * static_cast<double>(v);
  std::vector<double> counts(v, 0.0);
  for (const auto& [id, child] : n.children) counts[id] = nodes_[child].visits;
  counts[vocab_.eos()] += n.ends;
  for (std::size_t i = 0; i < v; ++i) dist[i] = (counts[i] + smoothing_) / total;
  return dist;
}

}  // namespace trag::rag

#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "trag/rag/generator.hpp"

namespace trag::rag {

struct RemoteGeneratorConfig {
  std::string base_url;
  std::chrono::milliseconds timeout{30000};
};

/// Client for an external seq2seq service:
///   POST /next_token {"prompt": string, "prefix_tokens": [string]} -> {"probs": [number]}
/// `probs` is indexed by the local vocabulary. Replies that are off by more than
/// 1e-6 are rejected; smaller drift is renormalized away.
class RemoteGenerator final : public Generator {
 public:
  RemoteGenerator(RemoteGeneratorConfig config, Vocabulary vocab);

  const Vocabulary& vocab() const override { return vocab_; }
  std::vector<double> next_token_dist(std::string_view prompt, std::span<const TokenId> prefix) const override;

 private:
  RemoteGeneratorConfig config_;
  Vocabulary vocab_;
};

/// One token per line, in the service's output order; must include "</s>".
Vocabulary load_vocab_file(const std::filesystem::path& path);

}  // namespace trag::rag

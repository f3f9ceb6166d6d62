#pragma once

#include <chrono>
#include <string>

#include "trag/dense/embedding.hpp"

namespace trag::dense {

struct RemoteProviderConfig {
  std::string base_url;  ///< scheme://host:port of the embedding service
  std::size_t dim = 768;
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{30000};
  unsigned max_in_flight = 4;
};

/// Client for an external encoder service:
///   POST /embed {"texts": [...], "mode": "query"|"passage"} -> {"vectors": [[...]]}
/// Replies are checked for count, length (DimensionMismatch) and finiteness.
class RemoteProvider final : public EmbeddingProvider {
 public:
  explicit RemoteProvider(RemoteProviderConfig config);

  std::size_t dim() const override { return config_.dim; }
  Vector embed_query(std::string_view text) const override;
  Vector embed_passage(std::string_view text) const override;
  /// Splits into batches of batch_size, at most max_in_flight requests at a time.
  std::vector<Vector> embed_passages(std::span<const std::string> texts) const override;
  std::string name() const override { return "remote"; }

 private:
  std::vector<Vector> request(std::span<const std::string> texts, std::string_view mode) const;
  RemoteProviderConfig config_;
};

}  // namespace trag::dense

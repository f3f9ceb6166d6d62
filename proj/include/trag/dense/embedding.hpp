#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trag::dense {

using Vector = std::vector<double>;

/// Bi-encoder contract: questions and passages are embedded separately into
/// vectors of length dim() with finite components.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual Vector embed_query(std::string_view text) const = 0;
  virtual Vector embed_passage(std::string_view text) const = 0;
  /// Batched passage embedding; the default loops over embed_passage.
  virtual std::vector<Vector> embed_passages(std::span<const std::string> texts) const;
  virtual std::string name() const = 0;
};

/// Signed feature hashing of analyzed terms, L2-normalized. Text without a
/// term maps to the zero vector. Throws std::invalid_argument if dim < 8.
Vector embed_local(std::string_view text, std::size_t dim);

/// Deterministic stand-in encoder backed by embed_local for both sides.
class LocalProvider final : public EmbeddingProvider {
 public:
  explicit LocalProvider(std::size_t dim = 256);
  std::size_t dim() const override { return dim_; }
  Vector embed_query(std::string_view text) const override { return embed_local(text, dim_); }
  Vector embed_passage(std::string_view text) const override { return embed_local(text, dim_); }
  std::string name() const override { return "local"; }

 private:
  std::size_t dim_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

}  // namespace trag::dense

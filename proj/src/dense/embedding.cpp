#include "trag/dense/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "trag/bm25/index.hpp"
#include "trag/util/hash.hpp"

namespace trag::dense {

std::vector<Vector> EmbeddingProvider::embed_passages(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_passage(t));
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vector embed_local(std::string_view text, std::size_t dim) {
  if (dim < 8) throw std::invalid_argument("embedding dim must be at least 8");
  std::vector<double> acc(dim, 0.0);
  for (const auto& term : bm25::analyze(text)) {
    const auto h = util::fnv1a64(term);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    acc[(h & 0x7fffffffffffffffULL) % dim] += sign;
  }
  double norm = 0.0;
  for (double x : acc) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& x : acc) x /= norm;
  }
  return acc;
}

LocalProvider::LocalProvider(std::size_t dim) : dim_(dim) {
  if (dim < 8) throw std::invalid_argument("embedding dim must be at least 8");
}

}  // namespace trag::dense

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trag/corpus/table.hpp"
#include "trag/dense/embedding.hpp"
#include "trag/dense/hnsw.hpp"

namespace trag::dense {

using corpus::SegmentRef;

enum class SearchMode { exact, ann };

struct DenseConfig {
  std::size_t ann_threshold = 1000;  ///< build the graph only at or above this many vectors
  HnswParams hnsw;
};

struct KnnHit {
  SegmentRef segment = 0;
  std::string table_id;
  double score = 0.0;  ///< inner product
};

/// Segment vectors plus an optional proximity graph. Immutable once built.
class DenseIndex {
 public:
  /// One embed_passage vector per segment. Throws EmptyCorpus or DimensionMismatch.
  static DenseIndex build(std::span<const corpus::Segment> segments, const EmbeddingProvider& provider,
                          const DenseConfig& config = {});
  /// Vectors with their owning table ids, same length.
  static DenseIndex from_vectors(std::span<const Vector> vectors, std::vector<std::string> table_ids,
                                 std::size_t dim, const DenseConfig& config = {});

  /// Sorted by descending score, ties by ascending segment ref. `dedup_tables`
  /// keeps only the best segment of each table. ANN falls back to exact when no
  /// graph was built. Throws EmptyIndex or DimensionMismatch.
  std::vector<KnnHit> knn(std::span<const double> query, std::size_t top_k, SearchMode mode,
                          bool dedup_tables = false, std::optional<std::size_t> ef_search = std::nullopt) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_ids_.size(); }
  bool has_graph() const { return graph_.has_value(); }
  const HnswGraph& graph() const { return *graph_; }
  std::span<const double> vector(SegmentRef ref) const;
  const std::string& table_of(SegmentRef ref) const { return table_ids_.at(ref); }

  std::string serialize() const;
  static DenseIndex deserialize(std::string bytes);
  void save(const std::filesystem::path& path) const;
  static DenseIndex load(const std::filesystem::path& path);

 private:
  std::vector<KnnHit> finish(std::vector<Neighbor> scored, std::size_t top_k, bool dedup) const;

  std::size_t dim_ = 0;
  std::vector<double> data_;  // row-major
  std::vector<std::string> table_ids_;
  std::optional<HnswGraph> graph_;
  DenseConfig config_;
};

}  // namespace trag::dense

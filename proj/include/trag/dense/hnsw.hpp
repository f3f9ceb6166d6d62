#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "trag/util/binary_io.hpp"

namespace trag::dense {

struct HnswParams {
  std::size_t M = 16;               ///< max out-degree above layer 0
  std::size_t M0 = 0;               ///< max out-degree on layer 0; 0 means 4*M
  std::size_t ef_construction = 200;
  std::size_t ef_search = 100;
  std::uint64_t seed = 42;          ///< level generator seed

  std::size_t layer0_degree() const { return M0 == 0 ? 4 * M : M0; }
};

/// (inner product, node id), best first.
using Neighbor = std::pair<double, std::uint32_t>;

/// Hierarchical navigable small-world graph over row-major vectors, using
/// inner product as similarity. The graph stores adjacency only; the vectors
/// are passed to every call and must be the ones the graph was built on.
class HnswGraph {
 public:
  /// Inserts rows 0..n-1 in order. Single-threaded and fully deterministic
  /// for a given (data, params).
  static HnswGraph build(std::span<const double> data, std::size_t dim, HnswParams params);

  std::vector<Neighbor> search(std::span<const double> data, std::size_t dim, std::span<const double> query,
                               std::size_t k, std::size_t ef) const;

  std::size_t size() const { return levels_.size(); }
  int max_level() const { return max_level_; }
  std::uint32_t entry_point() const { return entry_; }
  int level_of(std::uint32_t node) const { return levels_.at(node); }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t node, int level) const {
    return links_.at(node).at(static_cast<std::size_t>(level));
  }
  std::size_t max_degree(int level) const { return level == 0 ? params_.layer0_degree() : params_.M; }
  const HnswParams& params() const { return params_; }

  void write(util::BinaryWriter& w) const;
  static HnswGraph read(util::BinaryReader& r, std::size_t expected_nodes);

 private:
  explicit HnswGraph(HnswParams params) : params_(params) {}

  void insert(std::span<const double> data, std::size_t dim, std::uint32_t node, int level);
  std::vector<Neighbor> search_layer(std::span<const double> data, std::size_t dim, std::span<const double> query,
                                     std::vector<Neighbor> entry, std::size_t ef, int level) const;
  std::vector<std::uint32_t> select_neighbors(std::span<const double> data, std::size_t dim,
                                              std::vector<Neighbor> candidates, std::size_t m) const;

  HnswParams params_;
  std::vector<int> levels_;
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // node -> level -> neighbors
  std::uint32_t entry_ = 0;
  int max_level_ = -1;
};

}  // namespace trag::dense

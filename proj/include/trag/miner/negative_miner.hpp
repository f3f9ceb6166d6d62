#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trag/bm25/index.hpp"
#include "trag/corpus/table.hpp"

namespace trag::miner {

struct MinerConfig {
  std::size_t pool_size = 100;  ///< BM25 tables retrieved per question, gold included
  std::size_t k = 3;            ///< soft window over the non-gold pool
  std::size_t negatives_per_question = 1;
  std::uint64_t rng_seed = 17;
  unsigned threads = 1;

  /// Throws std::invalid_argument unless 1 <= negatives <= k <= pool_size.
  void validate() const;
};

struct MinedNegative {
  std::string qid;
  std::string negative_table_id;
  std::size_t bm25_rank = 0;  ///< 1-based, within the pool after gold removal
  bool operator==(const MinedNegative&) const = default;
};

struct MineResult {
  std::vector<MinedNegative> negatives;
  /// Questions for which BM25 found no non-gold table; they get zero negatives.
  std::vector<std::string> empty_pool;
};

/// Stream seed for one question. Depends only on the run seed and the qid, so
/// output does not depend on scheduling.
std::uint64_t question_seed(std::uint64_t run_seed, std::string_view qid);

/// Uniform draw without replacement from the first min(k, candidates.size())
/// entries of `candidates` (non-gold tables in BM25 order).
std::vector<MinedNegative> draw_from_window(const std::string& qid, std::span<const std::string> candidates,
                                            const MinerConfig& config);

/// Soft hard negatives: BM25 pool per question, every segment of the gold
/// table discarded, then a seeded uniform pick from the top k that remain.
MineResult mine(std::span<const corpus::QaExample> examples, const bm25::Bm25Index& index,
                const MinerConfig& config);

void write_negatives(std::ostream& out, std::span<const MinedNegative> negatives);
void save_negatives(const std::filesystem::path& path, std::span<const MinedNegative> negatives);

}  // namespace trag::miner

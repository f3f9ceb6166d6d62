#include "trag/miner/negative_miner.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "trag/errors.hpp"
#include "trag/util/hash.hpp"
#include "trag/util/rng.hpp"

namespace trag::miner {

void MinerConfig::validate() const {
  if (negatives_per_question == 0 || k == 0 || pool_size == 0) {
    throw std::invalid_argument("miner: pool, k and negatives per question must be positive");
  }
  if (k > pool_size) throw std::invalid_argument("miner: k must not exceed the pool size");
  if (negatives_per_question > k) throw std::invalid_argument("miner: negatives per question must not exceed k");
}

std::uint64_t question_seed(std::uint64_t run_seed, std::string_view qid) {
  return util::splitmix64(run_seed ^ util::fnv1a64(qid));
}

std::vector<MinedNegative> draw_from_window(const std::string& qid, std::span<const std::string> candidates,
                                            const MinerConfig& config) {
  const std::size_t window = std::min(config.k, candidates.size());
  const std::size_t n = std::min(config.negatives_per_question, window);
  std::vector<std::size_t> slots(window);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  std::mt19937_64 gen(question_seed(config.rng_seed, qid));
  std::vector<MinedNegative> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + util::bounded(gen, window - i);
    std::swap(slots[i], slots[j]);
    out.push_back({qid, candidates[slots[i]], slots[i] + 1});
  }
  return out;
}

namespace {

struct QuestionOutcome {
  std::vector<MinedNegative> negatives;
  bool empty_pool = false;
};

QuestionOutcome mine_one(const corpus::QaExample& ex, const bm25::Bm25Index& index, const MinerConfig& config) {
  std::vector<bm25::ScoredHit> pool;
  try {
    pool = index.search(ex.question, config.pool_size);
  } catch (const EmptyQuery&) {
  }
  std::vector<std::string> non_gold;
  non_gold.reserve(pool.size());
  for (auto& hit : pool) {
    if (hit.table_id != ex.gold_table_id) non_gold.push_back(std::move(hit.table_id));
  }
  if (non_gold.empty()) return {{}, true};
  return {draw_from_window(ex.qid, non_gold, config), false};
}

}  // namespace

MineResult mine(std::span<const corpus::QaExample> examples, const bm25::Bm25Index& index,
                const MinerConfig& config) {
  config.validate();
  std::vector<QuestionOutcome> outcomes(examples.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(examples.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < examples.size(); ++i) outcomes[i] = mine_one(examples[i], index, config);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < examples.size(); i += workers) outcomes[i] = mine_one(examples[i], index, config);
      });
    }
  }
  MineResult result;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (outcomes[i].empty_pool) {
      spdlog::warn("no non-gold table in the BM25 pool for question {}", examples[i].qid);
      result.empty_pool.push_back(examples[i].qid);
    }
    for (auto& n : outcomes[i].negatives) result.negatives.push_back(std::move(n));
  }
  return result;
}

void write_negatives(std::ostream& out, std::span<const MinedNegative> negatives) {
  for (const auto& n : negatives) {
    nlohmann::ordered_json j{{"qid", n.qid}, {"negative_table_id", n.negative_table_id}, {"bm25_rank", n.bm25_rank}};
    out << j.dump() << '\n';
  }
}

void save_negatives(const std::filesystem::path& path, std::span<const MinedNegative> negatives) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  write_negatives(out, negatives);
}

}  // namespace trag::miner

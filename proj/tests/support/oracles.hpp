#pragma once

// Naive reference implementations used to cross-check the library. They
// follow the textbook definitions directly and share no code paths with the
// optimized versions beyond character classification tables.

#include <cstddef>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "trag/bm25/index.hpp"
#include "trag/corpus/table.hpp"
#include "trag/rag/decode.hpp"
#include "trag/rag/generator.hpp"

namespace oracle {

std::string normalize(const std::string& s);
double f1(const std::string& pred, const std::string& gold);
double em(const std::string& pred, const std::vector<std::string>& golds);

struct RankValues {
  double rr = 0, hit1 = 0, ap = 0;
  std::map<std::size_t, double> recall, precision, ndcg;
};
RankValues rank_values(const std::vector<std::string>& ranking, const std::vector<std::string>& gold,
                       const std::vector<std::size_t>& ks);

struct TableScore {
  std::string table_id;
  double score;
};
/// Scores every segment independently, then max per table, ordered by
/// (score desc, table id asc); only positive scores.
std::vector<TableScore> bm25_search(std::span<const trag::corpus::Segment> segments, const std::string& query,
                                    trag::bm25::Params params = {});

struct Sequence {
  std::vector<trag::rag::TokenId> tokens;
  double log_prob;
};
/// Every finished sequence (EOS or max_len tokens) with nonzero mixture
/// probability, best first: log of sum over z of prior_z * prod p_z(token).
std::vector<Sequence> enumerate_sequences(const std::string& question,
                                          std::span<const trag::rag::RetrievedCandidate> candidates,
                                          const trag::rag::Generator& generator, std::size_t max_len);

std::vector<std::pair<std::uint32_t, double>> knn_scan(std::span<const std::vector<double>> vectors,
                                                       std::span<const double> query, std::size_t k);

}  // namespace oracle

namespace testdata {

std::string random_word(std::mt19937_64& rng, std::size_t min_len = 1, std::size_t max_len = 8);
/// Table with separator-free cells drawn from [a-z0-9 ] words.
trag::corpus::TableDoc random_table(std::mt19937_64& rng, const std::string& id, std::size_t max_rows,
                                    std::size_t max_cols, std::size_t max_words_per_cell);
std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::string& path() const { return path_; }
  std::string operator/(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace testdata

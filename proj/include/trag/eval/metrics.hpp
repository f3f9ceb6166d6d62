#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trag::eval {

struct EmF1 {
  double em = 0.0;  ///< 0 or 1
  double f1 = 0.0;
};

/// Token-multiset F1 between normalized strings; two empty token lists score 1.
double token_f1(std::string_view prediction, std::string_view gold);

/// EM and F1 maxed over the gold answers. Throws std::invalid_argument on no golds.
EmF1 em_f1(std::string_view prediction, std::span<const std::string> golds);

struct RankedTables {
  std::string qid;
  std::vector<std::string> ranking;  ///< rank 1 first, no duplicates
};

using GoldTables = std::unordered_map<std::string, std::vector<std::string>>;

/// Per-question table-ranking metrics against a set of relevant tables.
struct RankScores {
  double reciprocal_rank = 0.0;
  double hit1 = 0.0;
  double average_precision = 0.0;
  std::map<std::size_t, double> recall;     ///< by k
  std::map<std::size_t, double> precision;  ///< by k
  std::map<std::size_t, double> ndcg;       ///< by k
};

/// Binary relevance. AP averages precision at each relevant hit over |gold|;
/// DCG@k = sum rel_i / log2(i + 1) normalized by the ideal ordering.
RankScores score_ranking(std::span<const std::string> ranking, std::span<const std::string> gold,
                         std::span<const std::size_t> ks);

/// Aggregate metric values: name -> value in [0,1], plus per-question rows.
struct MetricReport {
  std::size_t n_questions = 0;
  std::map<std::string, double> metrics;
  std::vector<std::string> qids;
  std::map<std::string, std::vector<double>> per_question;  ///< aligned with qids

  void add(const std::string& qid, const std::map<std::string, double>& values);
  /// Arithmetic means; values are summed in sorted order so the result does not
  /// depend on question order.
  void finalize();
};

/// MRR, hit1, r@k, p@k, ndcg@k and map over every ranking. Throws MissingGold
/// for a qid without gold tables and DataError on a duplicate within a ranking.
MetricReport rank_metrics(std::span<const RankedTables> rankings, const GoldTables& gold,
                          std::span<const std::size_t> ks);

/// 1-based rank of the first answer with EM 1 against `golds`; 0 when none.
std::size_t first_correct_rank(std::span<const std::string> answers, std::span<const std::string> golds);

}  // namespace trag::eval

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trag/corpus/table.hpp"
#include "trag/eval/metrics.hpp"

namespace trag::eval {

/// One line of a predictions file:
/// {"qid", "answer", "ranking": [table ids], "table_id"?: provenance of answer,
///  "answers"?: [ranked answers], "oracle_answer"?}
struct Prediction {
  std::string qid;
  std::string answer;
  std::vector<std::string> ranking;
  std::optional<std::string> table_id;
  std::vector<std::string> answers;
  std::optional<std::string> oracle_answer;
};

nlohmann::ordered_json to_json(const Prediction& p);
Prediction parse_prediction(const nlohmann::json& j, std::size_t line_no);
std::vector<Prediction> read_predictions(std::istream& in);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);

inline constexpr std::string_view kDefaultMetrics = "em,f1,mrr,hit1,r@1,r@10,r@50,p@5,p@10,ndcg@5,ndcg@10,map";

/// Comma-separated metric names: em, f1, mrr, hit1, map, r@K, p@K, ndcg@K,
/// answer_mrr, answer_hit1, oracle_em, oracle_f1. Throws std::invalid_argument.
std::vector<std::string> parse_metric_list(std::string_view list);

struct EvalReport {
  MetricReport overall;
  /// "numeric" / "non_numeric" split (gold answer contains a digit), EM and F1 only.
  std::map<std::string, MetricReport> breakdown;

  nlohmann::ordered_json to_json() const;
};

/// Scores every prediction against its QA example. Throws MissingGold for a
/// prediction whose qid is not in `examples`.
EvalReport evaluate(std::span<const corpus::QaExample> examples, std::span<const Prediction> predictions,
                    std::span<const std::string> metrics);

bool is_numeric_question(const corpus::QaExample& example);

}  // namespace trag::eval

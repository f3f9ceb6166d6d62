#include "trag/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "trag/errors.hpp"
#include "trag/eval/normalize.hpp"

namespace trag::eval {

double token_f1(std::string_view prediction, std::string_view gold) {
  const auto p = normalized_tokens(prediction);
  const auto g = normalized_tokens(gold);
  if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
  std::unordered_map<std::string_view, int> counts;
  for (const auto& t : g) ++counts[t];
  std::size_t same = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return 0.0;
  const double precision = static_cast<double>(same) / static_cast<double>(p.size());
  const double recall = static_cast<double>(same) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

EmF1 em_f1(std::string_view prediction, std::span<const std::string> golds) {
  if (golds.empty()) throw std::invalid_argument("em_f1 needs at least one gold answer");
  const auto norm_pred = normalize_answer(prediction);
  EmF1 out;
  for (const auto& g : golds) {
    if (normalize_answer(g) == norm_pred) out.em = 1.0;
    out.f1 = std::max(out.f1, token_f1(prediction, g));
  }
  return out;
}

RankScores score_ranking(std::span<const std::string> ranking, std::span<const std::string> gold,
                         std::span<const std::size_t> ks) {
  const std::unordered_set<std::string_view> relevant(gold.begin(), gold.end());
  RankScores s;
  std::size_t hits = 0;
  double precision_sum = 0.0;
  std::vector<std::size_t> hit_ranks;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!relevant.contains(ranking[i])) continue;
    ++hits;
    hit_ranks.push_back(i + 1);
    precision_sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  const double n_rel = static_cast<double>(relevant.size());
  if (!hit_ranks.empty()) {
    s.reciprocal_rank = 1.0 / static_cast<double>(hit_ranks.front());
    s.hit1 = hit_ranks.front() == 1 ? 1.0 : 0.0;
  }
  s.average_precision = n_rel > 0 ? precision_sum / n_rel : 0.0;
  for (const auto k : ks) {
    std::size_t in_top = 0;
    double dcg = 0.0;
    for (const auto r : hit_ranks) {
      if (r > k) break;
      ++in_top;
      dcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    }
    double idcg = 0.0;
    for (std::size_t i = 1; i <= std::min(k, relevant.size()); ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 1.0);
    s.recall[k] = n_rel > 0 ? static_cast<double>(in_top) / n_rel : 0.0;
    s.precision[k] = static_cast<double>(in_top) / static_cast<double>(k);
    s.ndcg[k] = idcg > 0 ? dcg / idcg : 0.0;
  }
  return s;
}

void MetricReport::add(const std::string& qid, const std::map<std::string, double>& values) {
  qids.push_back(qid);
  for (const auto& [name, v] : values) per_question[name].push_back(v);
}

void MetricReport::finalize() {
  n_questions = qids.size();
  metrics.clear();
  for (const auto& [name, values] : per_question) {
    if (values.size() != qids.size()) throw std::logic_error("metric " + name + " missing for some questions");
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    metrics[name] = sorted.empty() ? 0.0 : sum / static_cast<double>(sorted.size());
  }
}

MetricReport rank_metrics(std::span<const RankedTables> rankings, const GoldTables& gold,
                          std::span<const std::size_t> ks) {
  for (const auto k : ks) {
    if (k == 0) throw std::invalid_argument("metric cutoff k must be positive");
  }
  MetricReport report;
  for (const auto& r : rankings) {
    auto it = gold.find(r.qid);
    if (it == gold.end() || it->second.empty()) throw MissingGold(r.qid);
    std::unordered_set<std::string_view> seen;
    for (const auto& t : r.ranking) {
      if (!seen.insert(t).second) throw DataError("ranking for " + r.qid + " lists table " + t + " twice");
    }
    const auto s = score_ranking(r.ranking, it->second, ks);
    std::map<std::string, double> row{{"mrr", s.reciprocal_rank}, {"hit1", s.hit1}, {"map", s.average_precision}};
    for (const auto k : ks) {
      const auto suffix = std::to_string(k);
      row["r@" + suffix] = s.recall.at(k);
      row["p@" + suffix] = s.precision.at(k);
      row["ndcg@" + suffix] = s.ndcg.at(k);
    }
    report.add(r.qid, row);
  }
  report.finalize();
  return report;
}

std::size_t first_correct_rank(std::span<const std::string> answers, std::span<const std::string> golds) {
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (em_f1(answers[i], golds).em == 1.0) return i + 1;
  }
  return 0;
}

}  // namespace trag::eval

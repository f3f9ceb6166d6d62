#include "trag/eval/report.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "trag/errors.hpp"

namespace trag::eval {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const Prediction& p) {
  ordered_json j;
  j["qid"] = p.qid;
  j["answer"] = p.answer;
  j["ranking"] = p.ranking;
  if (p.table_id) j["table_id"] = *p.table_id;
  if (!p.answers.empty()) j["answers"] = p.answers;
  if (p.oracle_answer) j["oracle_answer"] = *p.oracle_answer;
  return j;
}

Prediction parse_prediction(const json& j, std::size_t line_no) {
  try {
    Prediction p;
    p.qid = j.at("qid").get<std::string>();
    p.answer = j.value("answer", std::string{});
    if (auto it = j.find("ranking"); it != j.end()) p.ranking = it->get<std::vector<std::string>>();
    if (auto it = j.find("table_id"); it != j.end() && !it->is_null()) p.table_id = it->get<std::string>();
    if (auto it = j.find("answers"); it != j.end()) p.answers = it->get<std::vector<std::string>>();
    if (auto it = j.find("oracle_answer"); it != j.end() && !it->is_null()) p.oracle_answer = it->get<std::string>();
    return p;
  } catch (const json::exception& e) {
    throw MalformedRecord(line_no, e.what());
  }
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedRecord(line_no, e.what());
    }
    out.push_back(parse_prediction(j, line_no));
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_predictions(in);
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
  for (const auto& p : predictions) out << to_json(p).dump() << '\n';
}

namespace {

std::optional<std::size_t> cutoff(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  const auto digits = name.substr(prefix.size());
  if (digits.empty() || digits.size() > 6) return std::nullopt;
  std::size_t k = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    k = k * 10 + static_cast<std::size_t>(c - '0');
  }
  return k > 0 ? std::optional(k) : std::nullopt;
}

bool is_known(std::string_view m) {
  static const char* plain[] = {"em", "f1", "mrr", "hit1", "map", "answer_mrr", "answer_hit1", "oracle_em", "oracle_f1"};
  for (const char* p : plain) {
    if (m == p) return true;
  }
  return cutoff(m, "r@") || cutoff(m, "p@") || cutoff(m, "ndcg@");
}

ordered_json report_json(const MetricReport& r) {
  ordered_json j;
  j["n_questions"] = r.n_questions;
  ordered_json m = ordered_json::object();
  for (const auto& [name, v] : r.metrics) m[name] = v;
  j["metrics"] = m;
  return j;
}

}  // namespace

std::vector<std::string> parse_metric_list(std::string_view list) {
  std::vector<std::string> out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    if (!is_known(item)) throw std::invalid_argument("unknown metric: " + item);
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("no metrics requested");
  return out;
}

bool is_numeric_question(const corpus::QaExample& example) {
  for (const auto& a : example.answers) {
    for (char c : a) {
      if (std::isdigit(static_cast<unsigned char>(c))) return true;
    }
  }
  return false;
}

ordered_json EvalReport::to_json() const {
  ordered_json j = report_json(overall);
  if (!breakdown.empty()) {
    ordered_json b = ordered_json::object();
    for (const auto& [name, r] : breakdown) b[name] = report_json(r);
    j["breakdown"] = b;
  }
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < overall.qids.size(); ++i) {
    ordered_json row;
    row["qid"] = overall.qids[i];
    for (const auto& [name, values] : overall.per_question) row[name] = values[i];
    rows.push_back(row);
  }
  j["per_question"] = rows;
  return j;
}

EvalReport evaluate(std::span<const corpus::QaExample> examples, std::span<const Prediction> predictions,
                    std::span<const std::string> metrics) {
  std::unordered_map<std::string_view, const corpus::QaExample*> by_qid;
  for (const auto& ex : examples) by_qid.emplace(ex.qid, &ex);

  std::vector<std::size_t> ks;
  for (const auto& m : metrics) {
    for (const char* prefix : {"r@", "p@", "ndcg@"}) {
      if (auto k = cutoff(m, prefix); k && std::find(ks.begin(), ks.end(), *k) == ks.end()) ks.push_back(*k);
    }
  }
  const bool wants_em_f1 = std::any_of(metrics.begin(), metrics.end(), [](const auto& m) { return m == "em" || m == "f1"; });

  EvalReport report;
  for (const auto& p : predictions) {
    auto it = by_qid.find(p.qid);
    if (it == by_qid.end()) throw MissingGold(p.qid);
    const auto& ex = *it->second;

    std::map<std::string, double> all;
    const auto ef = em_f1(p.answer, ex.answers);
    all["em"] = ef.em;
    all["f1"] = ef.f1;
    const auto rs = score_ranking(p.ranking, std::span(&ex.gold_table_id, 1), ks);
    all["mrr"] = rs.reciprocal_rank;
    all["hit1"] = rs.hit1;
    all["map"] = rs.average_precision;
    for (const auto k : ks) {
      all["r@" + std::to_string(k)] = rs.recall.at(k);
      all["p@" + std::to_string(k)] = rs.precision.at(k);
      all["ndcg@" + std::to_string(k)] = rs.ndcg.at(k);
    }
    const auto& ranked_answers = p.answers.empty() ? std::vector<std::string>{p.answer} : p.answers;
    const auto first = first_correct_rank(ranked_answers, ex.answers);
    all["answer_mrr"] = first ? 1.0 / static_cast<double>(first) : 0.0;
    all["answer_hit1"] = first == 1 ? 1.0 : 0.0;
    if (std::find(metrics.begin(), metrics.end(), "oracle_em") != metrics.end() ||
        std::find(metrics.begin(), metrics.end(), "oracle_f1") != metrics.end()) {
      if (!p.oracle_answer) throw DataError("prediction " + p.qid + " has no oracle_answer");
      const auto oef = em_f1(*p.oracle_answer, ex.answers);
      all["oracle_em"] = oef.em;
      all["oracle_f1"] = oef.f1;
    }

    std::map<std::string, double> row;
    for (const auto& m : metrics) row[m] = all.at(m);
    report.overall.add(p.qid, row);
    if (wants_em_f1) {
      report.breakdown[is_numeric_question(ex) ? "numeric" : "non_numeric"].add(p.qid, {{"em", ef.em}, {"f1", ef.f1}});
    }
  }
  report.overall.finalize();
  for (auto& [_, r] : report.breakdown) r.finalize();
  return report;
}

}  // namespace trag::eval

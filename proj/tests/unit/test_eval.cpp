#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "trag/errors.hpp"
#include "trag/eval/metrics.hpp"
#include "trag/eval/normalize.hpp"
#include "trag/eval/report.hpp"

using namespace trag;
using namespace trag::eval;

namespace {
const std::vector<std::size_t> kFive = {5};
}

TEST_SUITE("eval") {

TEST_CASE("normalization") {
  CHECK(normalize_answer("The Beatles!") == "beatles");
  CHECK(normalize_answer("") == "");
  CHECK(normalize_answer("A  an THE") == "");
  CHECK(normalize_answer("  Hello,\tWorld  ") == "hello world");
  CHECK(normalize_answer("theatre an-other") == "theatre another");
  CHECK(normalize_answer("\xC2\xBFQu\xC3\x89 pas\xC3\xB3?") == "qu\xC3\xA9 pas\xC3\xB3");  // ¿ and ?
  CHECK(normalize_answer("\xE2\x80\x9Cquoted\xE2\x80\x9D \xE2\x80\x94 dash") == "quoted dash");
  CHECK(normalize_answer("\xFF" "a") == "\xEF\xBF\xBD" "a");
  CHECK(normalized_tokens("The cat, the hat") == std::vector<std::string>{"cat", "hat"});
  CHECK(is_unicode_punctuation(U'\u2014'));
  CHECK_FALSE(is_unicode_punctuation(U'€'));  // Sc, not P*
  CHECK(normalize_answer("$5") == "5");
  CHECK(to_lower(U'É') == U'é');
}

TEST_CASE("normalization agrees with the oracle on random strings") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> atoms = {"a", "An", "THE", "x", "Yz", ",", "!", " ", "\t", "\xC3\x89", "\xE2\x80\x94",
                                          "\xC2\xA0", "the", "9", "'", "\xE3\x80\x82", "\xF0\x9F\x98\x80"};
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const int n = static_cast<int>(rng() % 12);
    for (int j = 0; j < n; ++j) s += atoms[rng() % atoms.size()];
    CHECK(normalize_answer(s) == oracle::normalize(s));
    CHECK(normalize_answer(normalize_answer(s)) == normalize_answer(s));
  }
}

TEST_CASE("em and f1 examples") {
  const std::vector<std::string> smith = {"Smith"};
  auto r = em_f1("john smith", smith);
  CHECK(r.em == 0.0);
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const std::vector<std::string> answer = {"answer"};
  r = em_f1("the answer", answer);
  CHECK(r.em == 1.0);
  CHECK(r.f1 == 1.0);
  const std::vector<std::string> y = {"y"};
  r = em_f1("x", y);
  CHECK(r.em == 0.0);
  CHECK(r.f1 == 0.0);
  const std::vector<std::string> two = {"nope", "John Smith"};
  CHECK(em_f1("john smith", two).em == 1.0);
  CHECK_THROWS_AS(em_f1("x", std::vector<std::string>{}), std::invalid_argument);
  CHECK(token_f1("", "") == 1.0);
  CHECK(token_f1("the", "x") == 0.0);
  CHECK(token_f1("x b b", "b b c") == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("f1 properties") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    for (int j = 0, n = static_cast<int>(rng() % 6); j < n; ++j) a += testdata::random_word(rng, 1, 2) + " ";
    for (int j = 0, n = static_cast<int>(rng() % 6); j < n; ++j) b += testdata::random_word(rng, 1, 2) + " ";
    const double f = token_f1(a, b);
    CHECK(f == token_f1(b, a));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(std::abs(f - oracle::f1(a, b)) <= 1e-12);
    CHECK(token_f1(a, a) == 1.0);
  }
}

TEST_CASE("ranking examples") {
  const std::vector<std::string> gold = {"g"};
  const std::vector<std::string> second = {"x", "g", "y"};
  auto s = score_ranking(second, gold, kFive);
  CHECK(s.reciprocal_rank == 0.5);
  CHECK(s.hit1 == 0.0);
  CHECK(s.recall.at(5) == 1.0);
  CHECK(s.precision.at(5) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(s.ndcg.at(5) == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-15));
  CHECK(s.average_precision == 0.5);

  const std::vector<std::string> first = {"g", "x"};
  s = score_ranking(first, gold, kFive);
  CHECK(s.reciprocal_rank == 1.0);
  CHECK(s.hit1 == 1.0);
  CHECK(s.recall.at(5) == 1.0);
  CHECK(s.precision.at(5) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(s.ndcg.at(5) == 1.0);
  CHECK(s.average_precision == 1.0);

  const std::vector<std::string> missing = {"x", "y"};
  s = score_ranking(missing, gold, kFive);
  CHECK(s.reciprocal_rank == 0.0);
  CHECK(s.recall.at(5) == 0.0);
  CHECK(s.precision.at(5) == 0.0);
  CHECK(s.ndcg.at(5) == 0.0);
  CHECK(s.average_precision == 0.0);

  // outside the cutoff
  const std::vector<std::string> late = {"a", "b", "c", "d", "e", "g"};
  s = score_ranking(late, gold, kFive);
  CHECK(s.recall.at(5) == 0.0);
  CHECK(s.reciprocal_rank == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("ranking metrics agree with the oracle") {
  std::mt19937_64 rng(7);
  const std::vector<std::size_t> ks = {1, 3, 5, 10};
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> pool;
    for (int j = 0; j < 12; ++j) pool.push_back("t" + std::to_string(j));
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<std::string> ranking(pool.begin(), pool.begin() + static_cast<long>(rng() % 12));
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<std::string> gold(pool.begin(), pool.begin() + 1 + static_cast<long>(rng() % 3));
    const auto got = score_ranking(ranking, gold, ks);
    const auto want = oracle::rank_values(ranking, gold, ks);
    CHECK(got.reciprocal_rank == want.rr);
    CHECK(got.hit1 == want.hit1);
    CHECK(std::abs(got.average_precision - want.ap) <= 1e-12);
    for (auto k : ks) {
      CHECK(got.recall.at(k) == want.recall.at(k));
      CHECK(got.precision.at(k) == want.precision.at(k));
      CHECK(std::abs(got.ndcg.at(k) - want.ndcg.at(k)) <= 1e-12);
    }
  }
}

TEST_CASE("moving the gold up never lowers a metric") {
  const std::vector<std::size_t> ks = {1, 3, 5};
  const std::vector<std::string> gold = {"g"};
  std::vector<std::string> r = {"a", "b", "c", "d", "e", "g"};
  auto prev = score_ranking(r, gold, ks);
  for (std::size_t pos = r.size() - 1; pos > 0; --pos) {
    std::swap(r[pos], r[pos - 1]);
    const auto cur = score_ranking(r, gold, ks);
    CHECK(cur.reciprocal_rank >= prev.reciprocal_rank);
    CHECK(cur.average_precision >= prev.average_precision);
    for (auto k : ks) {
      CHECK(cur.recall.at(k) >= prev.recall.at(k));
      CHECK(cur.ndcg.at(k) >= prev.ndcg.at(k));
    }
    prev = cur;
  }
}

TEST_CASE("rank_metrics aggregates and validates") {
  const std::vector<RankedTables> rs = {{"q1", {"g1", "x"}}, {"q2", {"x", "g2"}}};
  const GoldTables gold = {{"q1", {"g1"}}, {"q2", {"g2"}}};
  const auto rep = rank_metrics(rs, gold, kFive);
  CHECK(rep.n_questions == 2);
  CHECK(rep.metrics.at("mrr") == 0.75);
  CHECK(rep.metrics.at("hit1") == 0.5);
  CHECK(rep.metrics.at("r@5") == 1.0);

  std::vector<RankedTables> reversed(rs.rbegin(), rs.rend());
  CHECK(rank_metrics(reversed, gold, kFive).metrics == rep.metrics);

  const std::vector<RankedTables> unknown = {{"q3", {"x"}}};
  CHECK_THROWS_AS(rank_metrics(unknown, gold, kFive), MissingGold);
  const std::vector<RankedTables> dup = {{"q1", {"x", "x"}}};
  CHECK_THROWS_AS(rank_metrics(dup, gold, kFive), DataError);
  const std::vector<std::size_t> zero = {0};
  CHECK_THROWS_AS(rank_metrics(rs, gold, zero), std::invalid_argument);
}

TEST_CASE("means do not depend on question order") {
  std::mt19937_64 rng(9);
  std::vector<std::pair<std::string, double>> rows;
  for (int i = 0; i < 200; ++i) rows.emplace_back("q" + std::to_string(i), std::uniform_real_distribution<double>()(rng));
  MetricReport a, b;
  for (const auto& [q, v] : rows) a.add(q, {{"m", v}});
  std::shuffle(rows.begin(), rows.end(), rng);
  for (const auto& [q, v] : rows) b.add(q, {{"m", v}});
  a.finalize();
  b.finalize();
  CHECK(a.metrics.at("m") == b.metrics.at("m"));
}

TEST_CASE("metric list parsing") {
  CHECK(parse_metric_list("em, f1,r@10,em") == std::vector<std::string>{"em", "f1", "r@10"});
  CHECK(parse_metric_list(kDefaultMetrics).size() == 12);
  CHECK_THROWS_AS(parse_metric_list("bleu"), std::invalid_argument);
  CHECK_THROWS_AS(parse_metric_list("r@0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_metric_list("r@x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_metric_list(" , "), std::invalid_argument);
}

TEST_CASE("evaluate") {
  const std::vector<corpus::QaExample> qa = {{"q1", "when?", "t1", {"1990"}},
                                             {"q2", "who?", "t2", {"A. Smith"}},
                                             {"q3", "what?", "t3", {"Oboe"}}};
  std::vector<Prediction> preds = {{"q1", "1990", {"t1"}, "t1", {}, "1990"},
                                   {"q2", "John Smith", {"t9", "t2"}, "t9", {"John Smith", "a smith"}, "A. Smith"},
                                   {"q3", "flute", {}, std::nullopt, {}, "oboe"}};
  const auto metrics = parse_metric_list("em,f1,mrr,r@5,answer_mrr,answer_hit1,oracle_em,oracle_f1");
  const auto rep = evaluate(qa, preds, metrics);
  CHECK(rep.overall.n_questions == 3);
  CHECK(rep.overall.metrics.at("em") == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rep.overall.metrics.at("mrr") == 0.5);
  CHECK(rep.overall.metrics.at("answer_mrr") == doctest::Approx((1.0 + 0.5) / 3.0).epsilon(1e-15));
  CHECK(rep.overall.metrics.at("answer_hit1") == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rep.overall.metrics.at("oracle_em") == 1.0);
  CHECK(rep.breakdown.at("numeric").n_questions == 1);
  CHECK(rep.breakdown.at("numeric").metrics.at("em") == 1.0);
  CHECK(rep.breakdown.at("non_numeric").n_questions == 2);

  const auto j = rep.to_json();
  CHECK(j.at("n_questions") == 3);
  CHECK(j.at("per_question").size() == 3);
  CHECK(j.at("per_question")[0].at("qid") == "q1");

  preds[2].oracle_answer.reset();
  CHECK_THROWS_AS(evaluate(qa, preds, metrics), DataError);
  preds.push_back({"q404", "x", {}, std::nullopt, {}, std::nullopt});
  CHECK_THROWS_AS(evaluate(qa, preds, parse_metric_list("em")), MissingGold);
}

TEST_CASE("966 predictions give a 966-question report") {
  std::vector<corpus::QaExample> qa;
  std::vector<Prediction> preds;
  for (int i = 0; i < 966; ++i) {
    const auto id = "q" + std::to_string(i);
    qa.push_back({id, "q?", "t" + std::to_string(i), {"a" + std::to_string(i % 7)}});
    preds.push_back({id, "a" + std::to_string(i % 5), {"t" + std::to_string(i)}, std::nullopt, {}, std::nullopt});
  }
  const auto rep = evaluate(qa, preds, parse_metric_list(kDefaultMetrics));
  CHECK(rep.overall.n_questions == 966);
  CHECK(rep.to_json().at("n_questions") == 966);
  CHECK(rep.overall.metrics.at("hit1") == 1.0);
}

TEST_CASE("prediction JSONL round trip") {
  const std::vector<Prediction> preds = {{"q1", "x", {"a", "b"}, "a", {"x", "y"}, "z"},
                                         {"q2", "", {}, std::nullopt, {}, std::nullopt}};
  std::stringstream ss;
  write_predictions(ss, preds);
  const auto text = ss.str();
  CHECK(text.substr(0, text.find('\n')) ==
        R"({"qid":"q1","answer":"x","ranking":["a","b"],"table_id":"a","answers":["x","y"],"oracle_answer":"z"})");
  const auto back = read_predictions(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].table_id == "a");
  CHECK(back[0].oracle_answer == "z");
  CHECK_FALSE(back[1].table_id.has_value());
  std::stringstream bad("{\"qid\": 3}\n");
  CHECK_THROWS_AS(read_predictions(bad), MalformedRecord);
}

}  // TEST_SUITE

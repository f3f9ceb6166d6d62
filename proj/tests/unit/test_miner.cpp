#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "trag/bm25/index.hpp"
#include "trag/miner/negative_miner.hpp"

using namespace trag;
using namespace trag::miner;

namespace {

corpus::Segment seg(std::string id, std::string text) {
  corpus::Segment s;
  s.table_id = std::move(id);
  s.text = std::move(text);
  return s;
}

// BM25 order for "apple": gold, n1, n2, n3, n4 (more occurrences rank higher).
bm25::Bm25Index ladder() {
  static const std::vector<corpus::Segment> segs = {
      seg("gold", "apple apple apple apple apple apple"), seg("n1", "apple apple apple apple apple pad"),
      seg("n2", "apple apple apple apple pad pad"), seg("n3", "apple apple apple pad pad pad"),
      seg("n4", "apple apple pad pad pad pad"), seg("other", "pear")};
  return bm25::Bm25Index::build(segs);
}

std::vector<corpus::QaExample> questions(std::size_t n, std::string gold = "gold") {
  std::vector<corpus::QaExample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"q" + std::to_string(i), "apple", gold, {"x"}});
  return out;
}

}  // namespace

TEST_SUITE("miner") {

TEST_CASE("the pool ladder is what the tests assume") {
  const auto hits = ladder().search("apple", 10);
  REQUIRE(hits.size() == 5);
  CHECK(hits[0].table_id == "gold");
  CHECK(hits[1].table_id == "n1");
  CHECK(hits[4].table_id == "n4");
}

TEST_CASE("one negative from the top-3 window, reproducible") {
  const auto idx = ladder();
  const auto qs = questions(1);
  MinerConfig cfg;
  const auto a = mine(qs, idx, cfg);
  REQUIRE(a.negatives.size() == 1);
  const auto& n = a.negatives[0];
  CHECK(n.qid == "q0");
  CHECK((n.negative_table_id == "n1" || n.negative_table_id == "n2" || n.negative_table_id == "n3"));
  CHECK(n.negative_table_id == "n" + std::to_string(n.bm25_rank));
  CHECK(mine(qs, idx, cfg).negatives == a.negatives);
}

TEST_CASE("k = 1 is the classic hard negative") {
  MinerConfig cfg;
  cfg.k = 1;
  for (const auto& n : mine(questions(50), ladder(), cfg).negatives) {
    CHECK(n.negative_table_id == "n1");
    CHECK(n.bm25_rank == 1);
  }
}

TEST_CASE("multiple negatives are distinct and inside the window") {
  MinerConfig cfg;
  cfg.k = 4;
  cfg.negatives_per_question = 3;
  const auto out = mine(questions(200), ladder(), cfg).negatives;
  REQUIRE(out.size() == 600);
  for (std::size_t i = 0; i < out.size(); i += 3) {
    std::set<std::string> ids{out[i].negative_table_id, out[i + 1].negative_table_id, out[i + 2].negative_table_id};
    CHECK(ids.size() == 3);
    for (std::size_t j = i; j < i + 3; ++j) {
      CHECK(out[j].bm25_rank <= 4);
      CHECK(out[j].negative_table_id != "gold");
    }
  }
}

TEST_CASE("uniform over the window") {
  MinerConfig cfg;
  const auto out = mine(questions(10000), ladder(), cfg).negatives;
  REQUIRE(out.size() == 10000);
  std::map<std::string, int> freq;
  for (const auto& n : out) ++freq[n.negative_table_id];
  REQUIRE(freq.size() == 3);
  for (const auto& [id, count] : freq) CHECK(std::abs(count / 10000.0 - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("seed and thread count") {
  const auto idx = ladder();
  const auto qs = questions(300);
  MinerConfig cfg;
  const auto base = mine(qs, idx, cfg).negatives;
  cfg.threads = 4;
  CHECK(mine(qs, idx, cfg).negatives == base);
  cfg.threads = 1;
  cfg.rng_seed = 18;
  CHECK(mine(qs, idx, cfg).negatives != base);
}

TEST_CASE("empty pools and short windows") {
  MinerConfig cfg;
  std::vector<corpus::QaExample> qs = {{"q0", "pear", "other", {"x"}}, {"q1", "durian", "gold", {"x"}},
                                       {"q2", "?!", "gold", {"x"}}, {"q3", "pear", "gold", {"x"}}};
  const auto r = mine(qs, ladder(), cfg);
  CHECK(r.empty_pool == std::vector<std::string>{"q0", "q1", "q2"});
  REQUIRE(r.negatives.size() == 1);
  CHECK(r.negatives[0].negative_table_id == "other");
  CHECK(r.negatives[0].bm25_rank == 1);
}

TEST_CASE("config validation") {
  MinerConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.negatives_per_question = 4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.pool_size = 2;
  CHECK_THROWS_AS(mine(questions(1), ladder(), cfg), std::invalid_argument);
}

TEST_CASE("negatives serialize as JSONL") {
  std::ostringstream out;
  const std::vector<MinedNegative> negs = {{"q1", "t7", 2}};
  write_negatives(out, negs);
  CHECK(out.str() == "{\"qid\":\"q1\",\"negative_table_id\":\"t7\",\"bm25_rank\":2}\n");
}

}  // TEST_SUITE

#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "trag/bm25/index.hpp"
#include "trag/corpus/io.hpp"
#include "trag/corpus/linearize.hpp"

using namespace trag;

namespace {

std::string generate_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::ostringstream out;
  for (std::size_t i = 0; i < n; ++i) {
    auto t = testdata::random_table(rng, "t" + std::to_string(i), 4, 3, 2);
    if (t.rows.empty()) t.rows.emplace_back(t.header.size(), "cell");
    out << corpus::to_json(t).dump() << '\n';
  }
  return out.str();
}

}  // namespace

TEST_SUITE("scale") {

TEST_CASE("a corpus the size of the open-domain table collection loads completely") {
  std::istringstream in(generate_corpus(169898, 1));
  const auto c = corpus::read_corpus(in);
  CHECK(c.size() == 169898);
  CHECK(c.find("t169897") != nullptr);
}

TEST_CASE("a 2,108-table corpus indexes at least one segment per table") {
  std::istringstream in(generate_corpus(2108, 2));
  const auto c = corpus::read_corpus(in);
  const auto segs = corpus::segment_corpus(c);
  const auto idx = bm25::Bm25Index::build(segs);
  CHECK(idx.num_segments() == segs.size());
  CHECK(idx.num_segments() >= 2108);
}

}  // TEST_SUITE

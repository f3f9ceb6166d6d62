#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "trag/cli/cli.hpp"

using namespace trag;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(TRAG_SOURCE_DIR) + "/data/fixtures/" + name; }

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> jsonl(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 1") {
  auto r = run({"index", "bm25", "--out", "nowhere"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("--corpus") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"ingest", "--corpus", fixture("ikar") + "/corpus.jsonl", "--budget", "0"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("index then retrieve prints ten JSONL hits") {
  testdata::TempDir dir("cli");
  const auto idx = dir / "idx";
  REQUIRE(run({"index", "bm25", "--corpus", fixture("ikar") + "/corpus.jsonl", "--out", idx, "--log-level", "off"}).code == 0);
  CHECK(fs::exists(idx + "/bm25.bin"));
  CHECK(fs::exists(idx + "/meta.json"));
  const auto r = run({"retrieve", "--query", "ikar editor", "--top", "10", "--index", idx, "--log-level", "off"});
  REQUIRE(r.code == 0);
  const auto hits = jsonl(r.out);
  REQUIRE(hits.size() == 10);
  CHECK(hits[0]["table_id"] == "ikar");
  CHECK(hits[0]["rank"] == 1);
  for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1]["score"] >= hits[i]["score"]);

  const auto answer = run({"answer", "--question", "who was the editor for Ikar?", "--index", idx, "--memorize",
                           fixture("ikar") + "/qa.jsonl", "--log-level", "off"});
  REQUIRE(answer.code == 0);
  const auto answers = jsonl(answer.out);
  REQUIRE(!answers.empty());
  CHECK(answers[0]["text"] == "A. Smith");
  CHECK(answers[0]["table_id"] == "ikar");

  CHECK(run({"retrieve", "--query", "???", "--index", idx, "--log-level", "off"}).code == cli::kExitUsage);
  CHECK(run({"retrieve", "--query", "x", "--index", dir / "missing", "--log-level", "off"}).code == cli::kExitData);
}

TEST_CASE("config files") {
  testdata::TempDir dir("cfg");
  const auto idx = dir / "idx";
  REQUIRE(run({"index", "bm25", "--corpus", fixture("ikar") + "/corpus.jsonl", "--out", idx, "--log-level", "off"}).code == 0);
  testdata::write_file(dir / "good.ini", "log-level = \"off\"\n[retrieve]\ntop = 3\n");
  auto r = run({"--config", dir / "good.ini", "retrieve", "--query", "ikar editor", "--index", idx});
  CHECK(r.code == 0);
  CHECK(jsonl(r.out).size() == 3);
  testdata::write_file(dir / "bad.ini", "bogus = 1\n");
  CHECK(run({"--config", dir / "bad.ini", "retrieve", "--query", "x", "--index", idx}).code == cli::kExitUsage);
}

TEST_CASE("missing gold tables surface as data errors") {
  testdata::TempDir dir("nogold");
  const auto full = testdata::read_file(fixture("synthetic50") + "/corpus.jsonl");
  std::string head;
  std::istringstream in(full);
  std::string line;
  for (int i = 0; i < 3 && std::getline(in, line); ++i) head += line + "\n";
  fs::create_directories(dir / "fx");
  testdata::write_file(dir / "fx/corpus.jsonl", head);
  fs::copy_file(fixture("synthetic50") + "/qa.jsonl", dir / "fx/qa.jsonl");
  const auto r = run({"smoke", "--fixture", dir / "fx", "--work", dir / "work", "--log-level", "error"});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("no gold table") != std::string::npos);
}

TEST_CASE("smoke is deterministic") {
  testdata::TempDir dir("smoke");
  const auto a = run({"smoke", "--fixture", fixture("synthetic50"), "--work", dir / "a", "--log-level", "warn"});
  const auto b = run({"smoke", "--fixture", fixture("synthetic50"), "--work", dir / "b", "--log-level", "warn"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const auto summary = nlohmann::json::parse(a.out);
  CHECK(summary["passed"] == true);
  CHECK(summary["hit1"] == 1.0);
  CHECK(summary["em"] == 1.0);
  CHECK(summary["n_questions"] == 50);
  for (const std::string f : {"report.json", "predictions.jsonl", "negatives.jsonl", "idx/bm25.bin", "idx/dense.bin",
                              "idx/meta.json", "idx/corpus.jsonl"}) {
    CAPTURE(f);
    CHECK(testdata::read_file(dir / ("a/" + f)) == testdata::read_file(dir / ("b/" + f)));
  }
}

}  // TEST_SUITE

#include "trag/cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/ranges.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "trag/bm25/index.hpp"
#include "trag/corpus/io.hpp"
#include "trag/corpus/linearize.hpp"
#include "trag/dense/dense_index.hpp"
#include "trag/dense/remote_provider.hpp"
#include "trag/engine.hpp"
#include "trag/errors.hpp"
#include "trag/eval/report.hpp"
#include "trag/miner/negative_miner.hpp"
#include "trag/service/service.hpp"

namespace trag::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
  // global
  std::uint64_t seed = 17;
  std::string log_level = "info";

  // ingest / index
  std::string corpus;
  std::vector<std::string> csv;
  std::string out_dir = "idx";
  std::size_t budget = corpus::kDefaultSegmentBudget;
  double bm25_k1 = bm25::Params{}.k1;
  double bm25_b = bm25::Params{}.b;
  std::size_t dim = 256;
  std::size_t ann_threshold = dense::DenseConfig{}.ann_threshold;
  std::size_t ef_search = dense::HnswParams{}.ef_search;
  std::size_t ef_construction = dense::HnswParams{}.ef_construction;
  std::size_t hnsw_m = dense::HnswParams{}.M;
  std::string embed_url;
  std::size_t embed_batch = dense::RemoteProviderConfig{}.batch_size;

  // mine
  std::string qa;
  std::string index = "idx";
  std::size_t k = miner::MinerConfig{}.k;
  std::size_t pool = miner::MinerConfig{}.pool_size;
  std::size_t per_question = miner::MinerConfig{}.negatives_per_question;
  unsigned threads = 1;
  std::string out;

  // retrieve / answer
  std::string query;
  std::size_t top = 10;
  std::string retriever = "bm25";
  std::string question;
  std::size_t n_docs = 5;
  std::size_t beam = 4;
  std::size_t max_len = 32;
  std::size_t ranking_depth = 50;
  std::string generator = "toy";
  std::string memorize;
  double smoothing = 1e-6;
  std::string gen_url;
  std::string gen_vocab;
  double temperature = 1.0;
  bool oracle = false;

  // eval
  std::string predictions;
  std::string metrics{eval::kDefaultMetrics};

  // serve
  std::string addr;
  std::string cors_origin;
  double heat_threshold = 0.5;

  // smoke
  std::string fixture = "data/fixtures/synthetic50";
  std::string work = "smoke_work";
};

class LoggerScope {
 public:
  LoggerScope(std::ostream& err) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("trag", sink);
    logger->set_pattern("[%H:%M:%S.%e] [%l] %v");
    spdlog::set_default_logger(logger);
  }
  ~LoggerScope() { spdlog::set_default_logger(previous_); }

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

std::string canonical_corpus(const corpus::Corpus& c) {
  std::ostringstream s;
  corpus::write_corpus(s, c);
  return s.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << bytes;
}

/// Writes corpus.jsonl into the index directory. Existing indexes survive only
/// when the corpus bytes and segment budget are unchanged.
IndexMeta stage_corpus(const IndexLayout& layout, const corpus::Corpus& c, std::size_t budget,
                       std::size_t num_segments) {
  fs::create_directories(layout.dir);
  const auto bytes = canonical_corpus(c);
  std::optional<IndexMeta> kept;
  if (fs::exists(layout.meta()) && read_file(layout.corpus()) == bytes) {
    try {
      auto m = IndexMeta::load(layout.meta());
      if (m.segment_budget == budget) kept = m;
    } catch (const DataError&) {
    }
  }
  if (!kept) {
    fs::remove(layout.bm25());
    fs::remove(layout.dense());
    write_file(layout.corpus(), bytes);
    kept = IndexMeta{};
  }
  kept->segment_budget = budget;
  kept->tokenizer = corpus::default_tokenizer()->name();
  kept->num_tables = c.size();
  kept->num_segments = num_segments;
  return *kept;
}

corpus::Corpus load_input_corpus(const Options& o) {
  if (!o.corpus.empty()) return corpus::load_corpus(o.corpus);
  std::vector<corpus::TableDoc> tables;
  for (const auto& path : o.csv) tables.push_back(corpus::load_csv_table(path));
  return corpus::Corpus(std::move(tables));
}

template <class T>
void emit_jsonl(std::ostream& out, const std::string& path, const T& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write(f);
}

int cmd_ingest(const Options& o) {
  const auto c = load_input_corpus(o);
  if (c.size() == 0) throw EmptyCorpus();
  const auto segments = corpus::segment_corpus(c, o.budget);
  const IndexLayout layout{o.out_dir};
  stage_corpus(layout, c, o.budget, segments.size()).save(layout.meta());
  spdlog::info("ingested {} tables into {} segments -> {}", c.size(), segments.size(), layout.corpus().string());
  return kExitOk;
}

int cmd_index(const Options& o, bool dense_kind) {
  const auto c = corpus::load_corpus(o.corpus);
  if (c.size() == 0) throw EmptyCorpus();
  const auto segments = corpus::segment_corpus(c, o.budget);
  const IndexLayout layout{o.out_dir};
  auto meta = stage_corpus(layout, c, o.budget, segments.size());
  if (!dense_kind) {
    const bm25::Params params{o.bm25_k1, o.bm25_b};
    const auto index = bm25::Bm25Index::build(segments, params);
    index.save(layout.bm25());
    meta.bm25 = params;
    spdlog::info("bm25: {} segments, {} terms -> {}", index.num_segments(), index.num_terms(),
                 layout.bm25().string());
  } else {
    std::unique_ptr<dense::EmbeddingProvider> provider;
    if (o.embed_url.empty()) {
      provider = std::make_unique<dense::LocalProvider>(o.dim);
    } else {
      dense::RemoteProviderConfig rc;
      rc.base_url = o.embed_url;
      rc.dim = o.dim;
      rc.batch_size = o.embed_batch;
      provider = std::make_unique<dense::RemoteProvider>(rc);
    }
    dense::DenseConfig dc;
    dc.ann_threshold = o.ann_threshold;
    dc.hnsw.M = o.hnsw_m;
    dc.hnsw.ef_construction = o.ef_construction;
    dc.hnsw.ef_search = o.ef_search;
    dc.hnsw.seed = o.seed;
    const auto index = dense::DenseIndex::build(segments, *provider, dc);
    index.save(layout.dense());
    meta.dense = IndexMeta::Dense{index.dim(), provider->name(), o.ann_threshold, index.has_graph()};
    spdlog::info("dense: {} vectors of dim {} ({}) -> {}", index.size(), index.dim(),
                 index.has_graph() ? "hnsw graph" : "exact only", layout.dense().string());
  }
  meta.save(layout.meta());
  return kExitOk;
}

int cmd_mine(const Options& o, std::ostream& out) {
  fs::path index_path = o.index;
  std::optional<corpus::Corpus> c;
  if (fs::is_directory(index_path)) {
    const IndexLayout layout{index_path};
    index_path = layout.bm25();
    if (fs::exists(layout.corpus())) c = corpus::load_corpus(layout.corpus());
  } else if (const auto sibling = index_path.parent_path() / "corpus.jsonl"; fs::exists(sibling)) {
    c = corpus::load_corpus(sibling);
  }
  const auto examples = corpus::load_qa(o.qa, c ? &*c : nullptr);
  const auto index = bm25::Bm25Index::load(index_path);

  miner::MinerConfig mc;
  mc.pool_size = o.pool;
  mc.k = o.k;
  mc.negatives_per_question = o.per_question;
  mc.rng_seed = o.seed;
  mc.threads = o.threads;
  const auto result = miner::mine(examples, index, mc);
  emit_jsonl(out, o.out, [&](std::ostream& s) { miner::write_negatives(s, result.negatives); });
  spdlog::info("mined {} negatives for {} questions ({} with an empty pool)", result.negatives.size(),
               examples.size(), result.empty_pool.size());
  return kExitOk;
}

EngineConfig engine_config(const Options& o, bool with_generator) {
  EngineConfig ec;
  ec.index_dir = o.index;
  ec.retriever = parse_retriever_kind(o.retriever);
  ec.generator = parse_generator_kind(o.generator);
  ec.toy_memory = o.memorize.empty() ? o.qa : o.memorize;
  ec.toy_smoothing = o.smoothing;
  ec.generator_url = o.gen_url;
  ec.generator_vocab = o.gen_vocab;
  ec.embed_url = o.embed_url;
  ec.load_generator = with_generator;
  return ec;
}

int cmd_retrieve(const Options& o, std::ostream& out) {
  const auto engine = Engine::open(engine_config(o, false));
  const auto hits = engine->retriever().retrieve(o.query, o.top);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    ordered_json j;
    j["rank"] = i + 1;
    j["table_id"] = hits[i].table_id;
    j["score"] = hits[i].score;
    j["segment"] = engine->segments()[hits[i].segment].seg_index;
    out << j.dump() << '\n';
  }
  return kExitOk;
}

std::vector<std::string> ranked_tables(const Engine& engine, std::string_view question, std::size_t depth) {
  std::vector<std::string> ids;
  for (auto& c : engine.retriever().retrieve(question, depth)) {
    if (std::find(ids.begin(), ids.end(), c.table_id) == ids.end()) ids.push_back(std::move(c.table_id));
  }
  return ids;
}

int cmd_answer(const Options& o, std::ostream& out) {
  if (o.oracle && o.qa.empty()) throw std::invalid_argument("--oracle needs --qa");
  const auto engine = Engine::open(engine_config(o, true));
  rag::AnswerOptions ao;
  ao.n_docs = o.n_docs;
  ao.decode.beam_width = o.beam;
  ao.decode.max_len = o.max_len;
  ao.temperature = o.temperature;

  if (!o.question.empty()) {
    const auto result = engine->ask(o.question, ao);
    for (std::size_t i = 0; i < result.answers.size(); ++i) {
      const auto& a = result.answers[i];
      ordered_json j;
      j["rank"] = i + 1;
      j["text"] = a.text;
      j["log_prob"] = a.log_prob;
      j["table_id"] = a.provenance_table_id;
      j["segment"] = engine->segments()[a.provenance_segment].seg_index;
      j["provenance_score"] = a.provenance_score;
      out << j.dump() << '\n';
    }
    return kExitOk;
  }

  const auto examples = corpus::load_qa(o.qa, &engine->corpus());
  std::vector<eval::Prediction> predictions;
  predictions.reserve(examples.size());
  std::size_t skipped = 0;
  for (const auto& ex : examples) {
    eval::Prediction p;
    p.qid = ex.qid;
    try {
      const auto result = engine->ask(ex.question, ao);
      for (const auto& a : result.answers) p.answers.push_back(a.text);
      if (!result.answers.empty()) {
        p.answer = result.answers.front().text;
        p.table_id = result.answers.front().provenance_table_id;
      }
      p.ranking = ranked_tables(*engine, ex.question, std::max(o.ranking_depth, o.n_docs));
    } catch (const EmptyQuery&) {
      ++skipped;
    } catch (const NoCandidates&) {
      ++skipped;
    }
    if (o.oracle) {
      const auto gold = engine->ask_with_gold(ex.question, ex.gold_table_id, ao);
      p.oracle_answer = gold.answers.empty() ? std::string{} : gold.answers.front().text;
    }
    predictions.push_back(std::move(p));
  }
  if (skipped) spdlog::warn("{} questions retrieved nothing and got an empty prediction", skipped);
  emit_jsonl(out, o.out, [&](std::ostream& s) { eval::write_predictions(s, predictions); });
  spdlog::info("answered {} questions", predictions.size());
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  auto names = eval::parse_metric_list(o.metrics);
  if (o.oracle) {
    for (const char* m : {"oracle_em", "oracle_f1"}) {
      if (std::find(names.begin(), names.end(), m) == names.end()) names.emplace_back(m);
    }
  }
  std::optional<corpus::Corpus> c;
  if (!o.corpus.empty()) c = corpus::load_corpus(o.corpus);
  const auto examples = corpus::load_qa(o.qa, c ? &*c : nullptr);
  const auto predictions = eval::load_predictions(o.predictions);
  const auto report = eval::evaluate(examples, predictions, names);
  const auto text = report.to_json().dump(2) + "\n";
  emit_jsonl(out, o.out, [&](std::ostream& s) { s << text; });
  for (const auto& [name, value] : report.overall.metrics) spdlog::info("{} = {:.4f}", name, value);
  return kExitOk;
}

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

int cmd_serve(const Options& o) {
  auto env = [](const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
  };
  Options resolved = o;
  resolved.index = env("TRAG_INDEX_DIR", o.index);
  resolved.generator = env("TRAG_GENERATOR", o.generator);
  resolved.memorize = env("TRAG_TOY_QA", o.memorize);
  const auto addr = o.addr.empty() ? env("TRAG_ADDR", "127.0.0.1:8080") : o.addr;
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("address must be host:port, got " + addr);
  const auto host = addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad port in address " + addr);
  }

  service::ServiceConfig sc;
  sc.n_docs = o.n_docs;
  sc.max_len = o.max_len;
  sc.temperature = o.temperature;
  sc.heat_threshold = o.heat_threshold;
  sc.cors_origin = o.cors_origin.empty() ? env("TRAG_CORS_ORIGIN", "*") : o.cors_origin;

  auto ec = engine_config(resolved, true);
  ec.serialize_generator = ec.generator == GeneratorKind::remote;

  service::Server server(sc);
  const int bound = server.bind(host, port);
  if (bound < 0) throw std::runtime_error("cannot bind " + addr);
  spdlog::info("listening on {}:{}", host, bound);

  std::atomic<int> status{kExitOk};
  std::jthread loader([&] {
    try {
      server.set_engine(Engine::open(ec));
      spdlog::info("index {} loaded", ec.index_dir.string());
    } catch (const std::exception& e) {
      spdlog::error("cannot load index: {}", e.what());
      status = kExitData;
      g_stop = true;
    }
  });

  g_stop = false;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  std::jthread watcher([&](std::stop_token st) {
    while (!st.stop_requested() && !g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  server.serve();
  watcher.request_stop();
  watcher.join();
  loader.join();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  return status;
}

int cmd_smoke(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path fixture = o.fixture;
  const fs::path work = o.work;
  const auto corpus_path = (fixture / "corpus.jsonl").string();
  const auto qa_path = (fixture / "qa.jsonl").string();
  const auto idx = (work / "idx").string();
  const auto predictions = (work / "predictions.jsonl").string();
  const auto report_path = (work / "report.json").string();
  fs::create_directories(work);

  const std::string seed = std::to_string(o.seed);
  const std::vector<std::vector<std::string>> stages = {
      {"ingest", "--corpus", corpus_path, "--out", idx},
      {"index", "bm25", "--corpus", corpus_path, "--out", idx},
      {"index", "dense", "--corpus", corpus_path, "--out", idx},
      {"mine", "--qa", qa_path, "--index", idx, "--out", (work / "negatives.jsonl").string()},
      {"answer", "--qa", qa_path, "--index", idx, "--out", predictions, "--oracle"},
      {"eval", "--qa", qa_path, "--predictions", predictions, "--corpus", (fs::path(idx) / "corpus.jsonl").string(),
       "--out", report_path, "--oracle"},
  };
  for (auto stage : stages) {
    stage.insert(stage.end(), {"--seed", seed, "--log-level", o.log_level});
    spdlog::info("smoke: trag {}", fmt::join(stage, " "));
    const int code = run(stage, out, err);
    if (code != kExitOk) {
      spdlog::error("smoke: stage `{}` failed with exit code {}", stage.front(), code);
      return code;
    }
  }

  std::ifstream in(report_path);
  const auto report = nlohmann::json::parse(in);
  const auto& m = report.at("metrics");
  const double hit1 = m.at("hit1").get<double>();
  const double em = m.at("em").get<double>();
  std::size_t wrong_provenance = 0;
  std::unordered_map<std::string, std::string> gold;
  for (const auto& ex : corpus::load_qa(qa_path)) gold[ex.qid] = ex.gold_table_id;
  for (const auto& p : eval::load_predictions(predictions)) {
    if (!p.table_id || *p.table_id != gold.at(p.qid)) ++wrong_provenance;
  }
  const bool ok = hit1 == 1.0 && em == 1.0 && wrong_provenance == 0;
  ordered_json summary;
  summary["n_questions"] = report.at("n_questions");
  summary["hit1"] = hit1;
  summary["em"] = em;
  summary["wrong_provenance"] = wrong_provenance;
  summary["passed"] = ok;
  out << summary.dump() << '\n';
  if (!ok) {
    spdlog::error("smoke: expected hit1 = em = 1 with gold provenance");
    return kExitSmokeFailed;
  }
  return kExitOk;
}

void add_index_options(CLI::App* sub, Options& o) {
  sub->add_option("--corpus", o.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "Index directory")->capture_default_str();
  sub->add_option("--budget", o.budget, "Segment token budget")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_engine_options(CLI::App* sub, Options& o) {
  sub->add_option("--index", o.index, "Index directory")->capture_default_str();
  sub->add_option("--retriever", o.retriever, "bm25, dense (exact scan) or ann")
      ->capture_default_str()
      ->check(CLI::IsMember({"bm25", "dense", "exact", "ann"}));
  sub->add_option("--embed-url", o.embed_url, "Embedding service for dense query encoding");
}

void add_generation_options(CLI::App* sub, Options& o) {
  sub->add_option("--n-docs", o.n_docs, "Retrieved tables per question")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--max-len", o.max_len, "Decoding steps, EOS included")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--generator", o.generator, "toy | remote")->capture_default_str()->check(CLI::IsMember({"toy", "remote"}));
  sub->add_option("--memorize", o.memorize, "QA file the toy generator memorizes");
  sub->add_option("--smoothing", o.smoothing, "Toy generator add-lambda smoothing")->capture_default_str();
  sub->add_option("--gen-url", o.gen_url, "Remote generator base URL");
  sub->add_option("--gen-vocab", o.gen_vocab, "Remote generator vocabulary, one token per line");
  sub->add_option("--temperature", o.temperature, "Softmax temperature for retrieval priors")->capture_default_str();
}

/// Global options plus those of the subcommand that ran, in config-file syntax.
std::string resolved_config(const CLI::App& app) {
  std::string prefix;
  for (const CLI::App* sub = &app; sub;) {
    const auto parsed = sub->get_subcommands();
    if (parsed.empty()) break;
    sub = parsed.front();
    prefix += sub->get_name() + ".";
  }
  std::istringstream all(app.config_to_str(true, false));
  std::string line, kept;
  while (std::getline(all, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto key = line.substr(0, eq);
    const bool global = key.find('.') == std::string::npos;
    const bool mine = key.rfind(prefix, 0) == 0 && key.find('.', prefix.size()) == std::string::npos;
    if (global || mine) kept += line + "\n";
  }
  return kept;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  LoggerScope logging(err);
  Options o;
  CLI::App app{"Table retrieval-augmented question answering", "trag"};
  app.set_config("--config", "", "Key-value config file mirroring the flags");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str()
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Validate and stage a corpus into an index directory");
  auto* corpus_opt = ingest->add_option("--corpus", o.corpus, "Corpus JSONL")->check(CLI::ExistingFile);
  auto* csv_opt = ingest->add_option("--csv", o.csv, "CSV tables, one table per file")->check(CLI::ExistingFile);
  corpus_opt->excludes(csv_opt);
  ingest->add_option("--out", o.out_dir, "Index directory")->capture_default_str();
  ingest->add_option("--budget", o.budget, "Segment token budget")->capture_default_str()->check(CLI::PositiveNumber);

  auto* index = app.add_subcommand("index", "Build a retrieval index");
  index->require_subcommand(1);
  auto* index_bm25 = index->add_subcommand("bm25", "Sparse BM25 index");
  add_index_options(index_bm25, o);
  index_bm25->add_option("--bm25-k1", o.bm25_k1, "Term-frequency saturation")->capture_default_str();
  index_bm25->add_option("--bm25-b", o.bm25_b, "Length normalization")->capture_default_str();
  auto* index_dense = index->add_subcommand("dense", "Dense inner-product index");
  add_index_options(index_dense, o);
  index_dense->add_option("--dim", o.dim, "Embedding dimension")->capture_default_str();
  index_dense->add_option("--ann-threshold", o.ann_threshold, "Build the HNSW graph at this many vectors")
      ->capture_default_str();
  index_dense->add_option("--ef-search", o.ef_search, "HNSW search beam")->capture_default_str();
  index_dense->add_option("--ef-construction", o.ef_construction, "HNSW build beam")->capture_default_str();
  index_dense->add_option("--hnsw-m", o.hnsw_m, "HNSW out-degree")->capture_default_str();
  index_dense->add_option("--embed-url", o.embed_url, "Embedding service (local hashing encoder if empty)");
  index_dense->add_option("--embed-batch", o.embed_batch, "Texts per embedding request")->capture_default_str();

  auto* mine = app.add_subcommand("mine", "Mine soft hard negatives");
  mine->add_option("--qa", o.qa, "QA JSONL")->required()->check(CLI::ExistingFile);
  mine->add_option("--index", o.index, "Index directory or bm25.bin")->capture_default_str();
  mine->add_option("--k", o.k, "Soft window size")->capture_default_str();
  mine->add_option("--pool", o.pool, "BM25 pool size")->capture_default_str();
  mine->add_option("--per-question", o.per_question, "Negatives per question")->capture_default_str();
  mine->add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  mine->add_option("--out", o.out, "Output JSONL (stdout if omitted)");

  auto* retrieve = app.add_subcommand("retrieve", "Rank tables for a query");
  retrieve->add_option("--query", o.query, "Query text")->required();
  retrieve->add_option("--top", o.top, "Tables to return")->capture_default_str()->check(CLI::PositiveNumber);
  add_engine_options(retrieve, o);

  auto* answer = app.add_subcommand("answer", "Answer one question or a QA file");
  auto* q_opt = answer->add_option("--question", o.question, "A single question");
  auto* qa_opt = answer->add_option("--qa", o.qa, "QA JSONL to answer in bulk")->check(CLI::ExistingFile);
  q_opt->excludes(qa_opt);
  answer->add_option("--out", o.out, "Predictions JSONL (stdout if omitted)");
  answer->add_option("--beam", o.beam, "Beam width")->capture_default_str()->check(CLI::PositiveNumber);
  answer->add_option("--ranking-depth", o.ranking_depth, "Tables kept in each prediction's ranking")
      ->capture_default_str();
  answer->add_flag("--oracle", o.oracle, "Also decode with the gold table as the only candidate");
  add_engine_options(answer, o);
  add_generation_options(answer, o);

  auto* ev = app.add_subcommand("eval", "Score predictions");
  ev->add_option("--qa", o.qa, "QA JSONL")->required()->check(CLI::ExistingFile);
  ev->add_option("--predictions", o.predictions, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  ev->add_option("--metrics", o.metrics, "Comma-separated metric names")->capture_default_str();
  ev->add_option("--corpus", o.corpus, "Corpus to check gold tables against")->check(CLI::ExistingFile);
  ev->add_option("--out", o.out, "Report JSON (stdout if omitted)");
  ev->add_flag("--oracle", o.oracle, "Add oracle_em and oracle_f1");

  auto* serve = app.add_subcommand("serve", "HTTP API");
  serve->add_option("--addr", o.addr, "host:port (TRAG_ADDR, default 127.0.0.1:8080)");
  serve->add_option("--cors-origin", o.cors_origin, "Allowed origin (TRAG_CORS_ORIGIN, default *)");
  serve->add_option("--heat-threshold", o.heat_threshold, "Minimum cell weight to highlight")->capture_default_str();
  add_engine_options(serve, o);
  add_generation_options(serve, o);

  auto* smoke = app.add_subcommand("smoke", "End-to-end run on a bundled fixture");
  smoke->add_option("--fixture", o.fixture, "Directory with corpus.jsonl and qa.jsonl")
      ->capture_default_str()
      ->check(CLI::ExistingDirectory);
  smoke->add_option("--work", o.work, "Scratch directory")->capture_default_str();

  for (auto* sub : {ingest, index, index_bm25, index_dense, mine, retrieve, answer, ev, serve, smoke}) {
    sub->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
    if (ingest->parsed() && o.corpus.empty() && o.csv.empty()) {
      throw CLI::RequiredError("ingest needs --corpus or --csv");
    }
    if (answer->parsed() && o.question.empty() && o.qa.empty()) {
      throw CLI::RequiredError("answer needs --question or --qa");
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(o.log_level));
  spdlog::info("resolved config:\n{}", resolved_config(app));
  try {
    if (ingest->parsed()) return cmd_ingest(o);
    if (index_bm25->parsed()) return cmd_index(o, false);
    if (index_dense->parsed()) return cmd_index(o, true);
    if (mine->parsed()) return cmd_mine(o, out);
    if (retrieve->parsed()) return cmd_retrieve(o, out);
    if (answer->parsed()) return cmd_answer(o, out);
    if (ev->parsed()) return cmd_eval(o, out);
    if (serve->parsed()) return cmd_serve(o);
    if (smoke->parsed()) return cmd_smoke(o, out, err);
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace trag::cli

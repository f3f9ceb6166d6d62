#include "trag/engine.hpp"

#include <fstream>

#include "trag/corpus/io.hpp"
#include "trag/dense/remote_provider.hpp"
#include "trag/errors.hpp"
#include "trag/rag/remote_generator.hpp"

namespace trag {

nlohmann::ordered_json IndexMeta::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = 1;
  j["segment_budget"] = segment_budget;
  j["tokenizer"] = tokenizer;
  j["num_tables"] = num_tables;
  j["num_segments"] = num_segments;
  if (bm25) j["bm25"] = {{"k1", bm25->k1}, {"b", bm25->b}};
  if (dense) {
    j["dense"] = {{"dim", dense->dim},
                  {"provider", dense->provider},
                  {"ann_threshold", dense->ann_threshold},
                  {"graph", dense->graph}};
  }
  return j;
}

IndexMeta IndexMeta::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<int>() != 1) throw FormatError("unsupported meta.json format");
    IndexMeta m;
    m.segment_budget = j.at("segment_budget").get<std::size_t>();
    m.tokenizer = j.at("tokenizer").get<std::string>();
    m.num_tables = j.at("num_tables").get<std::size_t>();
    m.num_segments = j.at("num_segments").get<std::size_t>();
    if (auto it = j.find("bm25"); it != j.end()) {
      m.bm25 = bm25::Params{it->at("k1").get<double>(), it->at("b").get<double>()};
    }
    if (auto it = j.find("dense"); it != j.end()) {
      m.dense = Dense{it->at("dim").get<std::size_t>(), it->at("provider").get<std::string>(),
                      it->at("ann_threshold").get<std::size_t>(), it->at("graph").get<bool>()};
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad meta.json: ") + e.what());
  }
}

IndexMeta IndexMeta::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string() + " (run `trag ingest` or `trag index` first)");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("bad meta.json: ") + e.what());
  }
}

void IndexMeta::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << to_json().dump(2) << '\n';
}

RetrieverKind parse_retriever_kind(std::string_view s) {
  if (s == "bm25") return RetrieverKind::bm25;
  if (s == "dense" || s == "exact") return RetrieverKind::dense_exact;
  if (s == "ann") return RetrieverKind::dense_ann;
  throw std::invalid_argument("unknown retriever: " + std::string(s) + " (bm25|dense|exact|ann)");
}

GeneratorKind parse_generator_kind(std::string_view s) {
  if (s == "toy") return GeneratorKind::toy;
  if (s == "remote") return GeneratorKind::remote;
  throw std::invalid_argument("unknown generator: " + std::string(s) + " (toy|remote)");
}

std::shared_ptr<const Engine> Engine::open(const EngineConfig& config) {
  const IndexLayout layout{config.index_dir};
  std::shared_ptr<Engine> e(new Engine());
  e->meta_ = IndexMeta::load(layout.meta());
  if (e->meta_.tokenizer != corpus::default_tokenizer()->name()) {
    throw FormatError("index was segmented with unknown tokenizer " + e->meta_.tokenizer);
  }
  e->corpus_ = corpus::load_corpus(layout.corpus());
  e->segments_ = corpus::segment_corpus(e->corpus_, e->meta_.segment_budget);

  if (std::filesystem::exists(layout.bm25())) {
    e->bm25_ = bm25::Bm25Index::load(layout.bm25());
    if (e->bm25_->num_segments() != e->segments_.size()) {
      throw FormatError("BM25 index does not match the corpus segments; rebuild the index");
    }
  }

  if (std::filesystem::exists(layout.dense())) {
    e->dense_ = dense::DenseIndex::load(layout.dense());
    if (e->dense_->size() != e->segments_.size()) {
      throw FormatError("dense index does not match the corpus segments; rebuild the index");
    }
    if (config.embed_url.empty() && e->meta_.dense && e->meta_.dense->provider != "local") {
      throw std::invalid_argument("the dense index was built with a remote encoder; pass its URL (--embed-url)");
    }
    if (!config.embed_url.empty()) {
      dense::RemoteProviderConfig rc;
      rc.base_url = config.embed_url;
      rc.dim = e->dense_->dim();
      e->provider_ = std::make_unique<dense::RemoteProvider>(rc);
    } else {
      e->provider_ = std::make_unique<dense::LocalProvider>(e->dense_->dim());
    }
  }

  switch (config.retriever) {
    case RetrieverKind::bm25:
      if (!e->bm25_) throw DataError("no BM25 index in " + config.index_dir.string() + " (run `trag index bm25`)");
      e->retriever_ = std::make_unique<rag::Bm25Retriever>(*e->bm25_, e->segments_);
      break;
    case RetrieverKind::dense_exact:
    case RetrieverKind::dense_ann:
      if (!e->dense_) throw DataError("no dense index in " + config.index_dir.string() + " (run `trag index dense`)");
      e->retriever_ = std::make_unique<rag::DenseRetriever>(
          *e->dense_, *e->provider_, e->segments_,
          config.retriever == RetrieverKind::dense_ann ? dense::SearchMode::ann : dense::SearchMode::exact);
      break;
  }

  if (!config.load_generator) return e;
  std::shared_ptr<const rag::Generator> gen;
  if (config.generator == GeneratorKind::toy) {
    if (config.toy_memory.empty()) throw std::invalid_argument("the toy generator needs a QA file to memorize (--memorize)");
    const auto memory = corpus::load_qa(config.toy_memory, &e->corpus_);
    gen = std::make_shared<rag::ToyGenerator>(rag::memorize_gold(memory, e->segments_, config.toy_smoothing));
  } else {
    if (config.generator_url.empty() || config.generator_vocab.empty()) {
      throw std::invalid_argument("the remote generator needs a URL and a vocabulary file");
    }
    rag::RemoteGeneratorConfig rc;
    rc.base_url = config.generator_url;
    gen = std::make_shared<rag::RemoteGenerator>(rc, rag::load_vocab_file(config.generator_vocab));
  }
  if (config.serialize_generator) gen = std::make_shared<rag::SerializedGenerator>(std::move(gen));
  e->generator_ = std::move(gen);
  return e;
}

rag::AnswerOutput Engine::ask(std::string_view question, const rag::AnswerOptions& options) const {
  if (!generator_) throw std::logic_error("engine was opened without a generator");
  return rag::answer(question, *retriever_, *generator_, options);
}

rag::AnswerOutput Engine::ask_with_gold(std::string_view question, const std::string& gold_table_id,
                                        const rag::AnswerOptions& options) const {
  if (!generator_) throw std::logic_error("engine was opened without a generator");
  if (!bm25_) throw DataError("gold-table decoding needs a BM25 index");
  return rag::answer_with_gold(question, gold_table_id, *bm25_, segments_, *generator_, options);
}

}  // namespace trag

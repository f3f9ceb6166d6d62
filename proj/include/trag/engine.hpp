#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trag/bm25/index.hpp"
#include "trag/corpus/linearize.hpp"
#include "trag/corpus/table.hpp"
#include "trag/dense/dense_index.hpp"
#include "trag/rag/pipeline.hpp"

namespace trag {

/// Files of an index directory.
struct IndexLayout {
  std::filesystem::path dir;

  std::filesystem::path corpus() const { return dir / "corpus.jsonl"; }
  std::filesystem::path bm25() const { return dir / "bm25.bin"; }
  std::filesystem::path dense() const { return dir / "dense.bin"; }
  std::filesystem::path meta() const { return dir / "meta.json"; }
};

/// idx/meta.json. Holds no timestamps or absolute paths so rebuilding from the
/// same inputs reproduces it byte for byte.
struct IndexMeta {
  std::size_t segment_budget = corpus::kDefaultSegmentBudget;
  std::string tokenizer = "basic";
  std::size_t num_tables = 0;
  std::size_t num_segments = 0;
  std::optional<bm25::Params> bm25;
  struct Dense {
    std::size_t dim = 0;
    std::string provider;
    std::size_t ann_threshold = 0;
    bool graph = false;
  };
  std::optional<Dense> dense;

  nlohmann::ordered_json to_json() const;
  static IndexMeta from_json(const nlohmann::json& j);
  static IndexMeta load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

enum class RetrieverKind { bm25, dense_exact, dense_ann };
enum class GeneratorKind { toy, remote };

RetrieverKind parse_retriever_kind(std::string_view s);
GeneratorKind parse_generator_kind(std::string_view s);

struct EngineConfig {
  std::filesystem::path index_dir = "idx";
  RetrieverKind retriever = RetrieverKind::bm25;
  GeneratorKind generator = GeneratorKind::toy;
  /// QA file whose gold answers the toy generator memorizes.
  std::filesystem::path toy_memory;
  double toy_smoothing = 1e-6;
  std::string generator_url;
  std::filesystem::path generator_vocab;
  /// Dense query encoder; empty means the local hashing provider.
  std::string embed_url;
  bool serialize_generator = false;
  /// Retrieval-only engines (retrieve subcommand) skip the generator.
  bool load_generator = true;
};

/// A loaded index directory plus a generator. Immutable after open(); safe for
/// concurrent ask() calls when the generator is.
class Engine {
 public:
  /// Throws DataError / FormatError on missing or inconsistent artifacts and
  /// std::invalid_argument on an unusable configuration.
  static std::shared_ptr<const Engine> open(const EngineConfig& config);

  const corpus::Corpus& corpus() const { return corpus_; }
  const std::vector<corpus::Segment>& segments() const { return segments_; }
  bool has_bm25() const { return bm25_.has_value(); }
  const bm25::Bm25Index& bm25() const { return *bm25_; }
  bool has_dense() const { return dense_.has_value(); }
  const IndexMeta& meta() const { return meta_; }
  const rag::Generator& generator() const { return *generator_; }
  const rag::Retriever& retriever() const { return *retriever_; }

  rag::AnswerOutput ask(std::string_view question, const rag::AnswerOptions& options) const;
  rag::AnswerOutput ask_with_gold(std::string_view question, const std::string& gold_table_id,
                                  const rag::AnswerOptions& options) const;

 private:
  Engine() = default;

  IndexMeta meta_;
  corpus::Corpus corpus_;
  std::vector<corpus::Segment> segments_;
  std::optional<bm25::Bm25Index> bm25_;
  std::optional<dense::DenseIndex> dense_;
  std::unique_ptr<dense::EmbeddingProvider> provider_;
  std::shared_ptr<const rag::Generator> generator_;
  std::unique_ptr<rag::Retriever> retriever_;
};

}  // namespace trag

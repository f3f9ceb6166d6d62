#include "trag/dense/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "trag/errors.hpp"

namespace trag::dense {

namespace {

constexpr std::string_view kMagic = "TRAGDNS1";
constexpr std::uint32_t kVersion = 1;

bool better(const Neighbor& a, const Neighbor& b) {
  return a.first != b.first ? a.first > b.first : a.second < b.second;
}

}  // namespace

DenseIndex DenseIndex::from_vectors(std::span<const Vector> vectors, std::vector<std::string> table_ids,
                                    std::size_t dim, const DenseConfig& config) {
  if (vectors.size() != table_ids.size()) throw std::invalid_argument("one table id per vector required");
  DenseIndex idx;
  idx.dim_ = dim;
  idx.config_ = config;
  idx.table_ids_ = std::move(table_ids);
  idx.data_.reserve(vectors.size() * dim);
  for (const auto& v : vectors) {
    if (v.size() != dim) throw DimensionMismatch(dim, v.size());
    for (double x : v) {
      if (!std::isfinite(x)) throw std::invalid_argument("embedding has a non-finite component");
    }
    idx.data_.insert(idx.data_.end(), v.begin(), v.end());
  }
  if (!vectors.empty() && vectors.size() >= config.ann_threshold) {
    idx.graph_ = HnswGraph::build(idx.data_, dim, config.hnsw);
  }
  return idx;
}

DenseIndex DenseIndex::build(std::span<const corpus::Segment> segments, const EmbeddingProvider& provider,
                             const DenseConfig& config) {
  if (segments.empty()) throw EmptyCorpus();
  std::vector<std::string> texts;
  std::vector<std::string> tables;
  texts.reserve(segments.size());
  tables.reserve(segments.size());
  for (const auto& s : segments) {
    texts.push_back(s.text);
    tables.push_back(s.table_id);
  }
  const auto vectors = provider.embed_passages(texts);
  if (vectors.size() != segments.size()) throw std::runtime_error("provider returned the wrong number of vectors");
  return from_vectors(vectors, std::move(tables), provider.dim(), config);
}

std::span<const double> DenseIndex::vector(SegmentRef ref) const {
  if (ref >= size()) throw std::out_of_range("segment ref out of range");
  return std::span(data_).subspan(static_cast<std::size_t>(ref) * dim_, dim_);
}

std::vector<KnnHit> DenseIndex::finish(std::vector<Neighbor> scored, std::size_t top_k, bool dedup) const {
  std::vector<KnnHit> out;
  std::unordered_set<std::string_view> seen;
  for (const auto& [score, ref] : scored) {
    if (out.size() >= top_k) break;
    const auto& table = table_ids_[ref];
    if (dedup && !seen.insert(table).second) continue;
    out.push_back({ref, table, score});
  }
  return out;
}

std::vector<KnnHit> DenseIndex::knn(std::span<const double> query, std::size_t top_k, SearchMode mode,
                                    bool dedup_tables, std::optional<std::size_t> ef_search) const {
  if (size() == 0) throw EmptyIndex();
  if (query.size() != dim_) throw DimensionMismatch(dim_, query.size());
  if (mode == SearchMode::ann && graph_) {
    const std::size_t fetch = dedup_tables ? std::max(top_k * 4, top_k + 16) : top_k;
    const std::size_t ef = std::max(ef_search.value_or(config_.hnsw.ef_search), fetch);
    auto found = graph_->search(data_, dim_, query, std::min(fetch, size()), ef);
    for (auto& [score, id] : found) score = dot(query, vector(id));
    std::sort(found.begin(), found.end(), better);
    return finish(std::move(found), top_k, dedup_tables);
  }
  std::vector<Neighbor> scored;
  scored.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    scored.emplace_back(dot(query, vector(static_cast<SegmentRef>(i))), static_cast<std::uint32_t>(i));
  }
  const std::size_t keep = dedup_tables ? scored.size() : std::min(top_k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  scored.resize(keep);
  return finish(std::move(scored), top_k, dedup_tables);
}

std::string DenseIndex::serialize() const {
  util::BinaryWriter w(kMagic, kVersion);
  w.u64(dim_);
  w.u64(size());
  w.u64(config_.ann_threshold);
  w.doubles(data_);
  for (const auto& t : table_ids_) w.str(t);
  w.u8(graph_ ? 1 : 0);
  if (graph_) {
    graph_->write(w);
  } else {
    // Parameters still round-trip so a reloaded index searches the same way.
    w.u64(config_.hnsw.M);
    w.u64(config_.hnsw.M0);
    w.u64(config_.hnsw.ef_construction);
    w.u64(config_.hnsw.ef_search);
    w.u64(config_.hnsw.seed);
  }
  return w.bytes();
}

DenseIndex DenseIndex::deserialize(std::string bytes) {
  util::BinaryReader r(std::move(bytes), kMagic, kVersion);
  DenseIndex idx;
  idx.dim_ = r.u64();
  const auto n = r.u64();
  idx.config_.ann_threshold = r.u64();
  if (idx.dim_ == 0) throw FormatError("dense index has zero dimension");
  idx.data_.resize(n * idx.dim_);
  r.doubles(idx.data_);
  idx.table_ids_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) idx.table_ids_.push_back(r.str());
  if (r.u8() != 0) {
    idx.graph_ = HnswGraph::read(r, n);
    idx.config_.hnsw = idx.graph_->params();
  } else {
    idx.config_.hnsw.M = r.u64();
    idx.config_.hnsw.M0 = r.u64();
    idx.config_.hnsw.ef_construction = r.u64();
    idx.config_.hnsw.ef_search = r.u64();
    idx.config_.hnsw.seed = r.u64();
  }
  if (!r.at_end()) throw FormatError("trailing bytes in dense index");
  return idx;
}

void DenseIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

DenseIndex DenseIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(std::move(ss).str());
}

}  // namespace trag::dense

#include "trag/bm25/index.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "trag/errors.hpp"
#include "trag/util/binary_io.hpp"

namespace trag::bm25 {

namespace {

constexpr std::string_view kMagic = "TRAGBM25";
constexpr std::uint32_t kVersion = 1;

bool word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

std::vector<std::string> distinct_sorted(std::vector<std::string> terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  return terms;
}

}  // namespace

std::vector<std::string> analyze(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (word_byte(c)) {
      cur += c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double idf(std::size_t num_docs, std::size_t df) {
  const double n = static_cast<double>(num_docs);
  const double d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double term_weight(double tf, double doc_len, double avg_doc_len, const Params& params) {
  const double norm = 1.0 - params.b + params.b * doc_len / avg_doc_len;
  return tf * (params.k1 + 1.0) / (tf + params.k1 * norm);
}

Bm25Index Bm25Index::build(std::span<const corpus::Segment> segments, Params params) {
  if (segments.empty()) throw EmptyCorpus();
  Bm25Index idx;
  idx.params_ = params;
  idx.doc_lengths_.reserve(segments.size());
  std::uint64_t total = 0;
  for (std::size_t ref = 0; ref < segments.size(); ++ref) {
    const auto terms = analyze(segments[ref].text);
    std::map<std::string_view, std::uint32_t> tf;
    for (const auto& t : terms) ++tf[t];
    for (const auto& [term, count] : tf) {
      idx.postings_[std::string(term)].push_back({static_cast<SegmentRef>(ref), count});
    }
    idx.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    idx.segment_tables_.push_back(segments[ref].table_id);
    idx.segment_indices_.push_back(segments[ref].seg_index);
    total += terms.size();
  }
  idx.avg_doc_len_ = static_cast<double>(total) / static_cast<double>(segments.size());
  return idx;
}

std::size_t Bm25Index::doc_freq(std::string_view term) const {
  const auto* p = postings(term);
  return p ? p->size() : 0;
}

const std::vector<Posting>* Bm25Index::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? nullptr : &it->second;
}

std::vector<std::pair<SegmentRef, double>> Bm25Index::score_segments(std::string_view query) const {
  const auto terms = distinct_sorted(analyze(query));
  if (terms.empty()) throw EmptyQuery();
  // Term-at-a-time in ascending term order: each segment's sum is accumulated
  // in the same order a per-document scorer would use.
  std::unordered_map<SegmentRef, double> acc;
  for (const auto& term : terms) {
    const auto* plist = postings(term);
    if (!plist) continue;
    const double w = idf(num_segments(), plist->size());
    for (const auto& p : *plist) {
      acc[p.segment] += w * term_weight(p.tf, doc_lengths_[p.segment], avg_doc_len_, params_);
    }
  }
  std::vector<std::pair<SegmentRef, double>> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ScoredHit> Bm25Index::search(std::string_view query, std::size_t top_k) const {
  const auto scored = score_segments(query);
  std::unordered_map<std::string_view, ScoredHit> best;
  for (const auto& [ref, score] : scored) {
    if (!(score > 0.0)) continue;
    const auto& table = segment_tables_[ref];
    auto [it, inserted] = best.try_emplace(table, ScoredHit{table, ref, score});
    // `scored` is in ascending ref order, so strict > keeps the earliest segment on ties.
    if (!inserted && score > it->second.score) it->second = ScoredHit{table, ref, score};
  }
  std::vector<ScoredHit> hits;
  hits.reserve(best.size());
  for (auto& [_, h] : best) hits.push_back(std::move(h));
  auto order = [](const ScoredHit& a, const ScoredHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.table_id < b.table_id;
  };
  if (hits.size() > top_k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top_k), hits.end(), order);
    hits.resize(top_k);
  } else {
    std::sort(hits.begin(), hits.end(), order);
  }
  return hits;
}

std::string Bm25Index::serialize() const {
  util::BinaryWriter w(kMagic, kVersion);
  w.f64(params_.k1);
  w.f64(params_.b);
  w.u32(static_cast<std::uint32_t>(doc_lengths_.size()));
  for (std::size_t i = 0; i < doc_lengths_.size(); ++i) {
    w.str(segment_tables_[i]);
    w.u32(segment_indices_[i]);
    w.u32(doc_lengths_[i]);
  }
  std::vector<const std::pair<const std::string, std::vector<Posting>>*> terms;
  terms.reserve(postings_.size());
  for (const auto& entry : postings_) terms.push_back(&entry);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return a->first < b->first; });
  w.u32(static_cast<std::uint32_t>(terms.size()));
  for (const auto* entry : terms) {
    w.str(entry->first);
    w.u32(static_cast<std::uint32_t>(entry->second.size()));
    for (const auto& p : entry->second) {
      w.u32(p.segment);
      w.u32(p.tf);
    }
  }
  return w.bytes();
}

Bm25Index Bm25Index::deserialize(std::string bytes) {
  util::BinaryReader r(std::move(bytes), kMagic, kVersion);
  Bm25Index idx;
  idx.params_.k1 = r.f64();
  idx.params_.b = r.f64();
  const auto n = r.u32();
  if (n == 0) throw FormatError("BM25 index has no segments");
  std::uint64_t total = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    idx.segment_tables_.push_back(r.str());
    idx.segment_indices_.push_back(r.u32());
    idx.doc_lengths_.push_back(r.u32());
    total += idx.doc_lengths_.back();
  }
  idx.avg_doc_len_ = static_cast<double>(total) / static_cast<double>(n);
  const auto terms = r.u32();
  idx.postings_.reserve(terms);
  for (std::uint32_t t = 0; t < terms; ++t) {
    auto term = r.str();
    const auto count = r.u32();
    std::vector<Posting> plist(count);
    for (auto& p : plist) {
      p.segment = r.u32();
      p.tf = r.u32();
      if (p.segment >= n) throw FormatError("posting refers to unknown segment");
    }
    idx.postings_.emplace(std::move(term), std::move(plist));
  }
  if (!r.at_end()) throw FormatError("trailing bytes in BM25 index");
  return idx;
}

void Bm25Index::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(std::move(ss).str());
}

}  // namespace trag::bm25

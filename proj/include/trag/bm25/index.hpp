#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trag/corpus/table.hpp"

namespace trag::bm25 {

using corpus::SegmentRef;

/// Lowercase (ASCII), split on non-alphanumerics, no stemming, no stopwords.
/// Bytes >= 0x80 count as alphanumeric so UTF-8 words stay whole.
std::vector<std::string> analyze(std::string_view text);

struct Params {
  double k1 = 0.9;
  double b = 0.4;
};

struct Posting {
  SegmentRef segment = 0;
  std::uint32_t tf = 0;
  bool operator==(const Posting&) const = default;
};

struct ScoredHit {
  std::string table_id;
  SegmentRef segment = 0;  ///< best-scoring segment of the table
  double score = 0.0;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5)); positive for every df <= N.
double idf(std::size_t num_docs, std::size_t df);

/// Saturated term-frequency component of one term in one document.
double term_weight(double tf, double doc_len, double avg_doc_len, const Params& params);

/// Immutable Okapi BM25 inverted index over corpus segments. Table scores take
/// the max over the table's segments; ties order by ascending table id.
class Bm25Index {
 public:
  /// Throws EmptyCorpus on an empty segment list.
  static Bm25Index build(std::span<const corpus::Segment> segments, Params params = {});

  /// At most `top_k` tables with a positive score. Throws EmptyQuery when the
  /// query has no indexable token.
  std::vector<ScoredHit> search(std::string_view query, std::size_t top_k) const;

  /// Per-segment scores for the distinct query terms, in ascending term order.
  /// Segments without a matching term are absent.
  std::vector<std::pair<SegmentRef, double>> score_segments(std::string_view query) const;

  std::size_t num_segments() const { return doc_lengths_.size(); }
  std::size_t num_terms() const { return postings_.size(); }
  double avg_doc_len() const { return avg_doc_len_; }
  const Params& params() const { return params_; }
  std::size_t doc_freq(std::string_view term) const;
  const std::vector<Posting>* postings(std::string_view term) const;
  std::uint32_t doc_length(SegmentRef ref) const { return doc_lengths_.at(ref); }
  const std::string& table_of(SegmentRef ref) const { return segment_tables_.at(ref); }
  std::uint32_t seg_index_of(SegmentRef ref) const { return segment_indices_.at(ref); }

  std::string serialize() const;
  static Bm25Index deserialize(std::string bytes);
  void save(const std::filesystem::path& path) const;
  static Bm25Index load(const std::filesystem::path& path);

 private:
  Params params_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::string> segment_tables_;
  std::vector<std::uint32_t> segment_indices_;
  double avg_doc_len_ = 0.0;
};

}  // namespace trag::bm25

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trag::corpus {

using Row = std::vector<std::string>;

/// A structured table. Rows are rectangular: every row has header.size() cells.
/// Header names may repeat.
struct TableDoc {
  std::string id;
  std::optional<std::string> title;
  std::vector<std::string> header;
  std::vector<Row> rows;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_cols() const { return header.size(); }
  bool operator==(const TableDoc&) const = default;
};

/// Throws NonRectangular (1-based row number) or MalformedRecord(0, ...) for an empty id.
void validate(const TableDoc& table);

struct QaExample {
  std::string qid;
  std::string question;
  std::string gold_table_id;
  std::vector<std::string> answers;
};

/// A table collection with unique ids, in load order.
class Corpus {
 public:
  Corpus() = default;
  /// Validates every table; throws DuplicateId / NonRectangular.
  explicit Corpus(std::vector<TableDoc> tables);

  const std::vector<TableDoc>& tables() const { return tables_; }
  std::size_t size() const { return tables_.size(); }
  bool empty() const { return tables_.empty(); }
  const TableDoc* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

 private:
  std::vector<TableDoc> tables_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// A retrieval unit: a title prefix followed by a run of linearized rows.
struct Segment {
  std::string table_id;
  std::uint32_t seg_index = 0;
  std::string text;
  std::size_t token_count = 0;
  /// text.substr(body_offset) is the row content without the title prefix.
  std::size_t body_offset = 0;
  /// Rows touched by this segment, half-open.
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  /// The body stops inside a row; the next segment resumes it directly.
  bool continues = false;

  std::string_view body() const { return std::string_view(text).substr(body_offset); }
  bool operator==(const Segment&) const = default;
};

/// Global segment position within a segmented corpus.
using SegmentRef = std::uint32_t;

}  // namespace trag::corpus

#include "trag/corpus/linearize.hpp"

#include "trag/errors.hpp"

namespace trag::corpus {

std::string linearize_row(const TableDoc& table, std::size_t row) {
  std::string out;
  const auto& cells = table.rows[row];
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c > 0) out += ' ';
    out += table.header[c];
    out += " | ";
    out += cells[c];
  }
  out += out.empty() ? "*" : " *";
  return out;
}

std::string segment_prefix(const TableDoc& table) { return table.title.value_or(""); }

std::string linearize(const TableDoc& table) {
  std::string out = segment_prefix(table);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (!out.empty()) out += ' ';
    out += linearize_row(table, r);
  }
  return out;
}

namespace {

class SegmentBuilder {
 public:
  SegmentBuilder(const TableDoc& table, std::string prefix, const Tokenizer& tokenizer)
      : table_(table), prefix_(std::move(prefix)), tokenizer_(tokenizer) {}

  bool empty() const { return body_.empty(); }
  std::size_t tokens() const { return body_tokens_; }

  void append(std::string_view piece, std::size_t piece_tokens, std::size_t row, bool continues) {
    if (body_.empty()) {
      row_begin_ = row;
    } else if (!continues_) {
      body_ += ' ';
    }
    body_ += piece;
    body_tokens_ += piece_tokens;
    row_end_ = row + 1;
    continues_ = continues;
  }

  void flush(std::vector<Segment>& out) {
    Segment seg;
    seg.table_id = table_.id;
    seg.seg_index = static_cast<std::uint32_t>(out.size());
    seg.text = prefix_;
    if (!prefix_.empty() && !body_.empty()) seg.text += ' ';
    seg.body_offset = seg.text.size();
    seg.text += body_;
    seg.token_count = tokenizer_.count(seg.text);
    seg.row_begin = row_begin_;
    seg.row_end = row_end_;
    seg.continues = continues_;
    out.push_back(std::move(seg));
    body_.clear();
    body_tokens_ = 0;
    continues_ = false;
    row_begin_ = row_end_;
  }

 private:
  const TableDoc& table_;
  std::string prefix_;
  const Tokenizer& tokenizer_;
  std::string body_;
  std::size_t body_tokens_ = 0;
  std::size_t row_begin_ = 0;
  std::size_t row_end_ = 0;
  bool continues_ = false;
};

}  // namespace

std::vector<Segment> segment(const TableDoc& table, std::size_t budget, const Tokenizer& tokenizer) {
  const std::string prefix = segment_prefix(table);
  const std::size_t prefix_tokens = tokenizer.count(prefix);
  if (prefix_tokens + 1 > budget) {
    throw BudgetTooSmall("table " + table.id + ": prefix needs " + std::to_string(prefix_tokens) +
                         " tokens, budget is " + std::to_string(budget));
  }
  const std::size_t room = budget - prefix_tokens;

  std::vector<Segment> out;
  SegmentBuilder current(table, prefix, tokenizer);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string row = linearize_row(table, r);
    const auto spans = tokenizer.split(row);
    if (current.tokens() + spans.size() <= room) {
      current.append(row, spans.size(), r, false);
      continue;
    }
    if (!current.empty()) current.flush(out);
    if (spans.size() <= room) {
      current.append(row, spans.size(), r, false);
      continue;
    }
    // Hard split: each piece keeps its trailing whitespace so pieces concatenate
    // back to the row verbatim. The last piece stays open for following rows.
    std::size_t start_tok = 0;
    std::size_t start_byte = 0;
    while (spans.size() - start_tok > room) {
      const std::size_t end_tok = start_tok + room;
      const std::size_t end_byte = spans[end_tok].begin;
      current.append(std::string_view(row).substr(start_byte, end_byte - start_byte), room, r, true);
      current.flush(out);
      start_tok = end_tok;
      start_byte = end_byte;
    }
    current.append(std::string_view(row).substr(start_byte), spans.size() - start_tok, r, false);
  }
  if (!current.empty() || (out.empty() && !prefix.empty())) current.flush(out);
  return out;
}

std::string reassemble_body(std::span<const Segment> segments) {
  std::string out;
  bool glue = true;
  for (const auto& seg : segments) {
    if (!out.empty() && !glue) out += ' ';
    out += seg.body();
    glue = seg.continues;
  }
  return out;
}

std::vector<Segment> segment_corpus(const Corpus& corpus, std::size_t budget, const Tokenizer& tokenizer) {
  std::vector<Segment> all;
  for (const auto& table : corpus.tables()) {
    auto segs = segment(table, budget, tokenizer);
    all.insert(all.end(), std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
  }
  return all;
}

}  // namespace trag::corpus

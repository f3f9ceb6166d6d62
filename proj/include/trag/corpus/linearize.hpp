#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trag/corpus/table.hpp"
#include "trag/corpus/tokenizer.hpp"

namespace trag::corpus {

inline constexpr std::size_t kDefaultSegmentBudget = 512;

/// One row as "<header> | <cell>" pairs joined by single spaces, terminated by " *".
std::string linearize_row(const TableDoc& table, std::size_t row);

/// Title (when present and non-empty) followed by every row, space separated.
/// Example: "Ikar Editor | A. Smith Year | 1990 *".
std::string linearize(const TableDoc& table);

/// Text that opens every segment of the table: the title, or "" without one.
/// Headers travel with each cell, so rows are self-describing without a header line.
std::string segment_prefix(const TableDoc& table);

/// Greedy packing of whole rows into segments of at most `budget` tokens each,
/// every segment starting with segment_prefix(). A row too long to fit on its
/// own is hard-split at token boundaries. Throws BudgetTooSmall when the prefix
/// leaves no room for a single token.
std::vector<Segment> segment(const TableDoc& table, std::size_t budget = kDefaultSegmentBudget,
                             const Tokenizer& tokenizer = *default_tokenizer());

/// Concatenation of segment bodies; equals the row part of linearize(table)
/// when `segments` are one table's segments in order.
std::string reassemble_body(std::span<const Segment> segments);

/// Segments for every table in corpus order; SegmentRef indexes into the result.
std::vector<Segment> segment_corpus(const Corpus& corpus, std::size_t budget = kDefaultSegmentBudget,
                                    const Tokenizer& tokenizer = *default_tokenizer());

}  // namespace trag::corpus

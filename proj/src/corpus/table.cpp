#include "trag/corpus/table.hpp"

#include "trag/errors.hpp"

namespace trag::corpus {

void validate(const TableDoc& table) {
  if (table.id.empty()) throw MalformedRecord(0, "empty table id");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) throw NonRectangular(table.id, r + 1);
  }
}

Corpus::Corpus(std::vector<TableDoc> tables) : tables_(std::move(tables)) {
  by_id_.reserve(tables_.size());
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    validate(tables_[i]);
    if (!by_id_.emplace(tables_[i].id, i).second) throw DuplicateId(tables_[i].id);
  }
}

const TableDoc* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &tables_[it->second];
}

}  // namespace trag::corpus

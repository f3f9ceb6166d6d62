#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trag {

/// Base class for errors caused by bad input data (as opposed to bad usage).
/// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRecord : public DataError {
 public:
  MalformedRecord(std::size_t line_no, const std::string& what)
      : DataError("malformed record at line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateId : public DataError {
 public:
  explicit DuplicateId(std::string id) : DataError("duplicate table id: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class NonRectangular : public DataError {
 public:
  NonRectangular(std::string id, std::size_t row_no)
      : DataError("table " + id + ": row " + std::to_string(row_no) + " does not match header width"),
        id_(std::move(id)),
        row_no_(row_no) {}
  const std::string& id() const { return id_; }
  /// 1-based row number.
  std::size_t row_no() const { return row_no_; }

 private:
  std::string id_;
  std::size_t row_no_;
};

/// A question whose gold table is unknown (absent from the corpus or from the gold map).
class MissingGold : public DataError {
 public:
  explicit MissingGold(std::string qid) : DataError("no gold table for question " + qid), qid_(std::move(qid)) {}
  const std::string& qid() const { return qid_; }

 private:
  std::string qid_;
};

class BudgetTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyCorpus : public DataError {
 public:
  EmptyCorpus() : DataError("cannot build an index over zero segments") {}
};

class EmptyQuery : public std::invalid_argument {
 public:
  EmptyQuery() : std::invalid_argument("query has no indexable token") {}
};

class EmptyIndex : public std::logic_error {
 public:
  EmptyIndex() : std::logic_error("index is empty") {}
};

class DimensionMismatch : public std::runtime_error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : std::runtime_error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                           std::to_string(got)) {}
};

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoCandidates : public std::runtime_error {
 public:
  NoCandidates() : std::runtime_error("no retrieval candidates to decode from") {}
};

/// Corrupt or incompatible persisted index file.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace trag

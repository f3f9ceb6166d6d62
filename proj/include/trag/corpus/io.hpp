#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "trag/corpus/table.hpp"

namespace trag::corpus {

/// Parses one corpus JSONL record:
/// {"id": string, "title": string|null, "header": [string], "rows": [[string]]}.
/// `line_no` is 1-based and only used for error reporting.
TableDoc parse_table(const nlohmann::json& record, std::size_t line_no);
nlohmann::json to_json(const TableDoc& table);

/// Blank lines are skipped. Throws MalformedRecord, DuplicateId, NonRectangular.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// {"qid": string, "question": string, "table_id": string, "answers": [string]}.
QaExample parse_qa(const nlohmann::json& record, std::size_t line_no);
nlohmann::json to_json(const QaExample& example);

/// When `corpus` is given, every gold table must exist in it (MissingGold otherwise).
std::vector<QaExample> read_qa(std::istream& in, const Corpus* corpus = nullptr);
std::vector<QaExample> load_qa(const std::filesystem::path& path, const Corpus* corpus = nullptr);

/// A CSV file with a header line becomes one table; id defaults to the file stem.
TableDoc load_csv_table(const std::filesystem::path& path, std::string id = {},
                        std::optional<std::string> title = std::nullopt);
/// RFC 4180 records (quoted fields, doubled quotes, CRLF or LF).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace trag::corpus

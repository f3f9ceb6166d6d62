#include "trag/corpus/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "trag/errors.hpp"

namespace trag::corpus {

using nlohmann::json;

namespace {

std::string require_string(const json& record, const char* key, std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw MalformedRecord(line_no, std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> require_strings(const json& value, const char* what, std::size_t line_no) {
  if (!value.is_array()) throw MalformedRecord(line_no, std::string(what) + " must be an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_string()) throw MalformedRecord(line_no, std::string(what) + " must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

json parse_line(const std::string& line, std::size_t line_no) {
  try {
    auto record = json::parse(line);
    if (!record.is_object()) throw MalformedRecord(line_no, "record is not a JSON object");
    return record;
  } catch (const json::parse_error& e) {
    throw MalformedRecord(line_no, e.what());
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

TableDoc parse_table(const json& record, std::size_t line_no) {
  TableDoc t;
  t.id = require_string(record, "id", line_no);
  if (t.id.empty()) throw MalformedRecord(line_no, "empty table id");
  if (auto it = record.find("title"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedRecord(line_no, "field \"title\" must be a string or null");
    t.title = it->get<std::string>();
  }
  auto header = record.find("header");
  if (header == record.end()) throw MalformedRecord(line_no, "missing field \"header\"");
  t.header = require_strings(*header, "header", line_no);
  auto rows = record.find("rows");
  if (rows == record.end() || !rows->is_array()) throw MalformedRecord(line_no, "field \"rows\" must be an array");
  t.rows.reserve(rows->size());
  for (const auto& row : *rows) t.rows.push_back(require_strings(row, "row", line_no));
  validate(t);
  return t;
}

json to_json(const TableDoc& table) {
  json j;
  j["id"] = table.id;
  j["title"] = table.title ? json(*table.title) : json(nullptr);
  j["header"] = table.header;
  j["rows"] = table.rows;
  return j;
}

Corpus read_corpus(std::istream& in) {
  std::vector<TableDoc> tables;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto table = parse_table(parse_line(line, line_no), line_no);
    if (!seen.insert(table.id).second) throw DuplicateId(table.id);
    tables.push_back(std::move(table));
  }
  return Corpus(std::move(tables));
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& t : corpus.tables()) out << to_json(t).dump() << '\n';
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  write_corpus(out, corpus);
}

QaExample parse_qa(const json& record, std::size_t line_no) {
  QaExample q;
  q.qid = require_string(record, "qid", line_no);
  q.question = require_string(record, "question", line_no);
  q.gold_table_id = require_string(record, "table_id", line_no);
  auto answers = record.find("answers");
  if (answers == record.end()) throw MalformedRecord(line_no, "missing field \"answers\"");
  q.answers = require_strings(*answers, "answers", line_no);
  if (q.qid.empty()) throw MalformedRecord(line_no, "empty qid");
  if (q.answers.empty()) throw MalformedRecord(line_no, "answers must be non-empty");
  return q;
}

json to_json(const QaExample& example) {
  return json{{"qid", example.qid},
              {"question", example.question},
              {"table_id", example.gold_table_id},
              {"answers", example.answers}};
}

std::vector<QaExample> read_qa(std::istream& in, const Corpus* corpus) {
  std::vector<QaExample> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto q = parse_qa(parse_line(line, line_no), line_no);
    if (!seen.insert(q.qid).second) throw MalformedRecord(line_no, "duplicate qid " + q.qid);
    if (corpus && !corpus->contains(q.gold_table_id)) throw MissingGold(q.qid);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QaExample> load_qa(const std::filesystem::path& path, const Corpus* corpus) {
  auto in = open_in(path);
  return read_qa(in, corpus);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw MalformedRecord(records.size() + 1, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

TableDoc load_csv_table(const std::filesystem::path& path, std::string id, std::optional<std::string> title) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto records = parse_csv(ss.str());
  if (records.empty()) throw MalformedRecord(1, "CSV file has no header line");
  TableDoc t;
  t.id = id.empty() ? path.stem().string() : std::move(id);
  t.title = std::move(title);
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) t.rows.push_back(std::move(records[r]));
  validate(t);
  return t;
}

}  // namespace trag::corpus

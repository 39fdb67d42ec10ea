#include "tableqa/table.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "tableqa/error.hpp"

namespace tableqa {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string decode_tsv_field(const std::string& raw, const std::string& origin, int row) {
  std::string out;
  out.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '\\') {
      out.push_back(raw[i]);
      continue;
    }
    if (i + 1 >= raw.size())
      throw DataError(origin + ": row " + std::to_string(row) + ": trailing backslash");
    char c = raw[++i];
    switch (c) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case '\\': out.push_back('\\'); break;
      default:
        throw DataError(origin + ": row " + std::to_string(row) +
                        ": unknown escape \\" + std::string(1, c));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> parse_tsv(const std::string& content,
                                                const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  size_t pos = 0;
  int row = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && pos >= content.size()) break;  // trailing blank line
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      std::string f = tab == std::string::npos ? line.substr(start)
                                               : line.substr(start, tab - start);
      fields.push_back(decode_tsv_field(f, origin, row));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    records.push_back(std::move(fields));
    ++row;
  }
  return records;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  bool field_started = false;
  bool field_was_quoted = false;
  size_t i = 0;
  auto end_field = [&]() {
    fields.push_back(cur);
    cur.clear();
    field_started = false;
    field_was_quoted = false;
  };
  auto end_record = [&]() {
    end_field();
    records.push_back(std::move(fields));
    fields.clear();
  };
  while (i < content.size()) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          cur.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      cur.push_back(c);
      ++i;
      continue;
    }
    if (c == '"') {
      if (field_started && !cur.empty())
        throw DataError(origin + ": stray quote at byte " + std::to_string(i));
      in_quotes = true;
      field_started = true;
      field_was_quoted = true;
      ++i;
      continue;
    }
    if (c == ',') { end_field(); ++i; continue; }
    if (c == '\r') { ++i; continue; }
    if (c == '\n') { end_record(); ++i; continue; }
    if (field_was_quoted)
      throw DataError(origin + ": content after closing quote at byte " + std::to_string(i));
    cur.push_back(c);
    field_started = true;
    ++i;
  }
  if (in_quotes) throw DataError(origin + ": unterminated quote");
  if (field_started || !fields.empty() || !cur.empty()) end_record();
  return records;
}

}  // namespace

std::string normalize_column_name(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      if (!out.empty() && out.back() != '_') out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  if (out.empty()) out = "col";
  // identifiers in the logical-form grammar cannot start with a digit
  if (std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(out.begin(), 'c');
  return out;
}

std::optional<int> Table::column_index(std::string_view normalized_name) const {
  for (size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == normalized_name) return static_cast<int>(i);
  return std::nullopt;
}

std::vector<CellValue> Table::value_universe() const {
  std::vector<CellValue> out;
  for (const auto& r : rows)
    for (const auto& c : r) out.push_back(c);
  for (int i = 0; i < row_count(); ++i) out.push_back(CellValue::number(i));
  std::sort(out.begin(), out.end(),
            [](const CellValue& a, const CellValue& b) { return compare_values(a, b) < 0; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const CellValue& a, const CellValue& b) {
                          return compare_values(a, b) == 0;
                        }),
            out.end());
  return out;
}

Table parse_table(const std::string& content, TableFormat fmt, const std::string& origin) {
  if (content.empty()) throw DataError(origin + ": empty table file");
  auto records = fmt == TableFormat::Tsv ? parse_tsv(content, origin)
                                         : parse_csv(content, origin);
  if (records.empty()) throw DataError(origin + ": empty table file");

  Table t;
  t.raw_column_names = records[0];
  std::map<std::string, int> used;
  for (const auto& raw : records[0]) {
    std::string base = normalize_column_name(raw);
    std::string name = base;
    while (used.count(name)) {
      name = base + "_" + std::to_string(++used[base] + 1);
    }
    used[name] = 0;
    t.column_names.push_back(name);
  }

  const size_t cols = t.column_names.size();
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != cols)
      throw DataError(origin + ": row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " cells, expected " +
                      std::to_string(cols));
    std::vector<CellValue> row;
    row.reserve(cols);
    for (const auto& cell : records[r]) row.push_back(normalize_value(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table load_table(const std::string& path, TableFormat fmt) {
  return parse_table(read_file(path), fmt, path);
}

TableFormat format_for_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == "csv") return TableFormat::Csv;
  }
  return TableFormat::Tsv;
}

}  // namespace tableqa

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tableqa/value.hpp"

namespace tableqa {

enum class TableFormat { Tsv, Csv };

/// Rectangular typed table. Immutable after load; safe to share across
/// threads.
struct Table {
  std::vector<std::string> column_names;      // normalized, unique
  std::vector<std::string> raw_column_names;  // as read
  std::vector<std::vector<CellValue>> rows;

  int row_count() const { return static_cast<int>(rows.size()); }
  int col_count() const { return static_cast<int>(column_names.size()); }
  std::optional<int> column_index(std::string_view normalized_name) const;

  /// Distinct cell values plus the row-index numbers, in canonical order.
  std::vector<CellValue> value_universe() const;
};

/// Lowercase, non-alphanumeric to underscore, collapse runs, trim. Empty
/// result becomes "col".
std::string normalize_column_name(const std::string& raw);

/// Header row mandatory. TSV uses backslash escapes (\t \n \\); CSV follows
/// RFC 4180 quoting. Cells are typed via normalize_value.
Table load_table(const std::string& path, TableFormat fmt);
Table parse_table(const std::string& content, TableFormat fmt, const std::string& origin);

/// Picks the format from the file extension (.csv, else TSV).
TableFormat format_for_path(const std::string& path);

}  // namespace tableqa

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tableqa {

struct Date {
  std::optional<int> year;
  std::optional<int> month;
  std::optional<int> day;

  bool any() const { return year || month || day; }
  friend bool operator==(const Date&, const Date&) = default;
};

enum class ValueKind { Text, Number, Date };

/// A typed table cell. Cells are typed once, when the raw string is first
/// seen (normalize_value); the executor and the answer matcher only ever see
/// typed values.
struct CellValue {
  ValueKind kind = ValueKind::Text;
  std::string surface;  // original form as read from the file
  std::string norm;     // lowercase, whitespace-collapsed
  double num = 0.0;
  Date date;

  static CellValue text(std::string s);
  static CellValue number(double v, std::string surface_form = {});
  static CellValue make_date(Date d, std::string surface_form = {});

  /// Canonical rendering: normalized text, trimmed decimal, or date parts
  /// joined "day month year".
  std::string display() const;
};

/// Lowercase (ASCII), collapse whitespace runs to a single space, trim.
std::string normalize_text(const std::string& s);

/// Integer, decimal, or thousands-separated number. Input is assumed
/// normalized. Rejects NaN/inf.
std::optional<double> try_parse_number(const std::string& s);

/// Date patterns, tried in order on a normalized string:
///   1. YYYY-MM[-DD]
///   2. <month-name> D[,] YYYY
///   3. <month-name> YYYY
///   4. D <month-name> YYYY
///   5. <month-name> D
///   6. MM YYYY          (numeric month)
///   7. D MM YYYY        (numeric month)
///   8. YYYY             (year only; unreachable through normalize_value,
///                        which tries numbers first)
/// A bare month name does not parse as a date.
std::optional<Date> try_parse_date(const std::string& s);

/// Number, then date, else text. Deterministic; never fails.
CellValue normalize_value(const std::string& raw);

/// Equality for answer matching: case-insensitive text, numbers within
/// 1e-6 absolute, dates on components both sides specify. A text value
/// that itself parses as number/date is compared as the parsed kind.
bool single_value_match(const CellValue& a, const CellValue& b);

/// Set equality of answer lists under single_value_match: order- and
/// duplicate-insensitive.
bool values_match(const std::vector<CellValue>& a, const std::vector<CellValue>& b);

/// Canonical total order over values (numbers, then dates, then text).
/// Exact comparisons; used for deterministic set storage.
int compare_values(const CellValue& a, const CellValue& b);

std::string format_number(double v);

}  // namespace tableqa

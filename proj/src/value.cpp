#include "tableqa/value.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "tableqa/error.hpp"

namespace tableqa {

namespace {

constexpr double kNumTolerance = 1e-6;

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

const std::array<std::pair<const char*, int>, 25>& month_names() {
  static const std::array<std::pair<const char*, int>, 25> names = {{
      {"january", 1},  {"february", 2}, {"march", 3},    {"april", 4},
      {"may", 5},      {"june", 6},     {"july", 7},     {"august", 8},
      {"september", 9},{"october", 10}, {"november", 11},{"december", 12},
      {"jan", 1},      {"feb", 2},      {"mar", 3},      {"apr", 4},
      {"jun", 6},      {"jul", 7},      {"aug", 8},      {"sep", 9},
      {"sept", 9},     {"oct", 10},     {"nov", 11},     {"dec", 12},
      {"", 0},
  }};
  return names;
}

std::optional<int> month_from_name(const std::string& tok) {
  for (const auto& [name, m] : month_names())
    if (m != 0 && tok == name) return m;
  return std::nullopt;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::optional<int> as_int(const std::string& s, size_t min_len, size_t max_len) {
  if (s.size() < min_len || s.size() > max_len || !all_digits(s)) return std::nullopt;
  return std::atoi(s.c_str());
}

bool valid_month(int m) { return m >= 1 && m <= 12; }
bool valid_day(int d) { return d >= 1 && d <= 31; }
bool valid_year(int y) { return y >= 1000 && y <= 9999; }

}  // namespace

CellValue CellValue::text(std::string s) {
  CellValue v;
  v.kind = ValueKind::Text;
  v.surface = s;
  v.norm = normalize_text(s);
  return v;
}

CellValue CellValue::number(double d, std::string surface_form) {
  if (!std::isfinite(d)) throw NumericError("non-finite cell value");
  CellValue v;
  v.kind = ValueKind::Number;
  v.num = d;
  v.surface = surface_form.empty() ? format_number(d) : surface_form;
  v.norm = normalize_text(v.surface);
  return v;
}

CellValue CellValue::make_date(Date d, std::string surface_form) {
  if (!d.any()) throw DataError("date value with no components");
  CellValue v;
  v.kind = ValueKind::Date;
  v.date = d;
  if (surface_form.empty()) {
    std::string s;
    if (d.day) s += std::to_string(*d.day);
    if (d.month) s += (s.empty() ? "" : " ") + std::to_string(*d.month);
    if (d.year) s += (s.empty() ? "" : " ") + std::to_string(*d.year);
    surface_form = s;
  }
  v.surface = surface_form;
  v.norm = normalize_text(v.surface);
  return v;
}

std::string CellValue::display() const {
  switch (kind) {
    case ValueKind::Number: return format_number(num);
    case ValueKind::Date: {
      std::string s;
      if (date.day) s += std::to_string(*date.day);
      if (date.month) s += (s.empty() ? "" : " ") + std::to_string(*date.month);
      if (date.year) s += (s.empty() ? "" : " ") + std::to_string(*date.year);
      return s;
    }
    case ValueKind::Text: return norm;
  }
  return norm;
}

std::string normalize_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (is_ws(static_cast<char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::optional<double> try_parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  size_t i = 0;
  if (s[i] == '+' || s[i] == '-') ++i;
  if (i == s.size()) return std::nullopt;

  std::string digits;
  digits.reserve(s.size());
  if (s[0] == '-') digits.push_back('-');

  // integer part, optionally with strict thousands grouping
  size_t int_start = i;
  size_t first_comma = s.find(',', i);
  if (first_comma != std::string::npos) {
    size_t lead = first_comma - int_start;
    if (lead < 1 || lead > 3) return std::nullopt;
    size_t p = int_start;
    while (p < first_comma) {
      if (!std::isdigit(static_cast<unsigned char>(s[p]))) return std::nullopt;
      digits.push_back(s[p++]);
    }
    while (p < s.size() && s[p] == ',') {
      ++p;
      for (int k = 0; k < 3; ++k, ++p) {
        if (p >= s.size() || !std::isdigit(static_cast<unsigned char>(s[p]))) return std::nullopt;
        digits.push_back(s[p]);
      }
      if (p < s.size() && s[p] != ',' && s[p] != '.') return std::nullopt;
    }
    i = p;
  } else {
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits.push_back(s[i++]);
  }

  bool have_int = digits.size() > (s[0] == '-' ? 1u : 0u);
  bool have_frac = false;
  if (i < s.size() && s[i] == '.') {
    digits.push_back(s[i++]);
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits.push_back(s[i++]);
      have_frac = true;
    }
    if (!have_frac) return std::nullopt;
  }
  if (i != s.size() || (!have_int && !have_frac)) return std::nullopt;

  double v = std::strtod(digits.c_str(), nullptr);
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<Date> try_parse_date(const std::string& s) {
  if (s.empty()) return std::nullopt;

  // ISO form on a single token
  if (s.find(' ') == std::string::npos && s.find('-') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == '-') { parts.push_back(cur); cur.clear(); }
      else cur.push_back(c);
    }
    parts.push_back(cur);
    if (parts.size() == 2 || parts.size() == 3) {
      auto y = as_int(parts[0], 4, 4);
      auto m = as_int(parts[1], 1, 2);
      if (y && m && valid_year(*y) && valid_month(*m)) {
        Date d{*y, *m, std::nullopt};
        if (parts.size() == 3) {
          auto dd = as_int(parts[2], 1, 2);
          if (!dd || !valid_day(*dd)) return std::nullopt;
          d.day = *dd;
        }
        return d;
      }
    }
    return std::nullopt;
  }

  std::vector<std::string> toks;
  std::string cur;
  for (char c : s) {
    if (c == ' ') { if (!cur.empty()) toks.push_back(cur); cur.clear(); }
    else cur.push_back(c);
  }
  if (!cur.empty()) toks.push_back(cur);
  for (auto& t : toks)
    while (!t.empty() && t.back() == ',') t.pop_back();

  if (toks.size() == 1) {
    auto y = as_int(toks[0], 4, 4);
    if (y && valid_year(*y)) return Date{*y, std::nullopt, std::nullopt};
    return std::nullopt;
  }

  if (toks.size() == 2) {
    if (auto m = month_from_name(toks[0])) {
      if (auto y = as_int(toks[1], 4, 4); y && valid_year(*y))
        return Date{*y, *m, std::nullopt};
      if (auto d = as_int(toks[1], 1, 2); d && valid_day(*d))
        return Date{std::nullopt, *m, *d};
      return std::nullopt;
    }
    auto m = as_int(toks[0], 1, 2);
    auto y = as_int(toks[1], 4, 4);
    if (m && y && valid_month(*m) && valid_year(*y)) return Date{*y, *m, std::nullopt};
    return std::nullopt;
  }

  if (toks.size() == 3) {
    // month-name day year
    if (auto m = month_from_name(toks[0])) {
      auto d = as_int(toks[1], 1, 2);
      auto y = as_int(toks[2], 4, 4);
      if (d && y && valid_day(*d) && valid_year(*y)) return Date{*y, *m, *d};
      return std::nullopt;
    }
    // day month-name year
    if (auto m = month_from_name(toks[1])) {
      auto d = as_int(toks[0], 1, 2);
      auto y = as_int(toks[2], 4, 4);
      if (d && y && valid_day(*d) && valid_year(*y)) return Date{*y, *m, *d};
      return std::nullopt;
    }
    // day month year, all numeric
    auto d = as_int(toks[0], 1, 2);
    auto m = as_int(toks[1], 1, 2);
    auto y = as_int(toks[2], 4, 4);
    if (d && m && y && valid_day(*d) && valid_month(*m) && valid_year(*y))
      return Date{*y, *m, *d};
  }
  return std::nullopt;
}

CellValue normalize_value(const std::string& raw) {
  std::string n = normalize_text(raw);
  if (auto num = try_parse_number(n)) {
    CellValue v = CellValue::number(*num, raw);
    return v;
  }
  // year-only is claimed by the number parser above
  if (n.find_first_of("0123456789") != std::string::npos) {
    if (auto d = try_parse_date(n)) return CellValue::make_date(*d, raw);
  }
  return CellValue::text(raw);
}

namespace {

// Re-type a text value whose content parses as number/date.
CellValue canonical_for_match(const CellValue& v) {
  if (v.kind != ValueKind::Text) return v;
  return normalize_value(v.norm);
}

bool date_match(const Date& a, const Date& b) {
  int mutual = 0;
  if (a.year && b.year) { if (*a.year != *b.year) return false; ++mutual; }
  if (a.month && b.month) { if (*a.month != *b.month) return false; ++mutual; }
  if (a.day && b.day) { if (*a.day != *b.day) return false; ++mutual; }
  return mutual > 0;
}

}  // namespace

bool single_value_match(const CellValue& a0, const CellValue& b0) {
  CellValue a = canonical_for_match(a0);
  CellValue b = canonical_for_match(b0);
  if (a.kind == ValueKind::Number && b.kind == ValueKind::Number)
    return std::fabs(a.num - b.num) <= kNumTolerance;
  if (a.kind == ValueKind::Date && b.kind == ValueKind::Date)
    return date_match(a.date, b.date);
  if (a.kind == ValueKind::Text && b.kind == ValueKind::Text)
    return a.norm == b.norm;
  // a year-only date matches its plain number form
  const CellValue* n = a.kind == ValueKind::Number ? &a : (b.kind == ValueKind::Number ? &b : nullptr);
  const CellValue* d = a.kind == ValueKind::Date ? &a : (b.kind == ValueKind::Date ? &b : nullptr);
  if (n && d && d->date.year && !d->date.month && !d->date.day)
    return std::fabs(n->num - *d->date.year) <= kNumTolerance;
  return false;
}

bool values_match(const std::vector<CellValue>& a, const std::vector<CellValue>& b) {
  auto covered = [](const std::vector<CellValue>& xs, const std::vector<CellValue>& ys) {
    for (const auto& x : xs) {
      bool hit = false;
      for (const auto& y : ys)
        if (single_value_match(x, y)) { hit = true; break; }
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

int compare_values(const CellValue& a, const CellValue& b) {
  auto rank = [](ValueKind k) {
    switch (k) {
      case ValueKind::Number: return 0;
      case ValueKind::Date: return 1;
      case ValueKind::Text: return 2;
    }
    return 2;
  };
  if (rank(a.kind) != rank(b.kind)) return rank(a.kind) < rank(b.kind) ? -1 : 1;
  switch (a.kind) {
    case ValueKind::Number:
      if (a.num < b.num) return -1;
      if (a.num > b.num) return 1;
      return 0;
    case ValueKind::Date: {
      auto part = [](const std::optional<int>& p) { return p ? *p : -1; };
      std::array<int, 3> x = {part(a.date.year), part(a.date.month), part(a.date.day)};
      std::array<int, 3> y = {part(b.date.year), part(b.date.month), part(b.date.day)};
      if (x < y) return -1;
      if (y < x) return 1;
      return 0;
    }
    case ValueKind::Text:
      return a.norm.compare(b.norm) < 0 ? -1 : (a.norm == b.norm ? 0 : 1);
  }
  return 0;
}

std::string format_number(double v) {
  if (std::floor(v) == v && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace tableqa

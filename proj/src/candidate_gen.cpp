#include "tableqa/candidate_gen.hpp"

#include "tableqa/error.hpp"
#include "tableqa/lf.hpp"

namespace tableqa::harness {

namespace {

using lf::NodePtr;

// Distinct cells of one column in first-occurrence order.
std::vector<CellValue> distinct_cells(const Table& t, int col) {
  std::vector<CellValue> out;
  for (int r = 0; r < t.row_count(); ++r) {
    const CellValue& v = t.rows[r][col];
    bool seen = false;
    for (const auto& u : out)
      if (compare_values(u, v) == 0) seen = true;
    if (!seen) out.push_back(v);
  }
  return out;
}

bool numeric_column(const Table& t, int col) {
  if (t.row_count() == 0) return false;
  for (int r = 0; r < t.row_count(); ++r)
    if (t.rows[r][col].kind != ValueKind::Number) return false;
  return true;
}

// relation pairing each row with the numeric value of `col`:
// R[lambda(x, R[number].R[col].x)]
NodePtr row_number_relation(const std::string& col) {
  return lf::reverse(lf::lambda(
      "x", lf::join(lf::reverse(lf::relation(lf::kNumberCast)),
                    lf::join(lf::reverse(lf::relation(col)), lf::var("x")))));
}

}  // namespace

std::vector<std::string> generate_candidates_minimal(const std::string& question,
                                                     const Table& table, int budget) {
  (void)question;
  if (budget <= 0) throw UsageError("candidate budget must be positive");

  std::vector<std::string> out;
  auto emit = [&out, budget](lf::NodePtr n) {
    if (static_cast<int>(out.size()) < budget)
      out.push_back(lf::serialize(*n));
    return static_cast<int>(out.size()) < budget;
  };
  using namespace tableqa::lf;

  if (!emit(aggregation(AggOp::Count, relation(kAllRows)))) return out;

  // first/last row projections
  for (int a = 0; a < table.col_count(); ++a) {
    for (SupOp op : {SupOp::ArgMax, SupOp::ArgMin}) {
      if (!emit(join(reverse(relation(table.column_names[a])),
                     superlative(op, relation(kAllRows), relation(kIndex)))))
        return out;
    }
  }

  // lookups: values of column a on rows filtered by column b
  for (int a = 0; a < table.col_count(); ++a) {
    for (int b = 0; b < table.col_count(); ++b) {
      if (a == b) continue;
      for (const auto& v : distinct_cells(table, b)) {
        if (!emit(join(reverse(relation(table.column_names[a])),
                       join(relation(table.column_names[b]), value(v)))))
          return out;
      }
    }
  }

  // counts of filtered rows
  for (int b = 0; b < table.col_count(); ++b) {
    for (const auto& v : distinct_cells(table, b)) {
      if (!emit(aggregation(AggOp::Count, join(relation(table.column_names[b]), value(v)))))
        return out;
    }
  }

  // superlatives over numeric columns
  for (int a = 0; a < table.col_count(); ++a) {
    for (int m = 0; m < table.col_count(); ++m) {
      if (a == m || !numeric_column(table, m)) continue;
      for (SupOp op : {SupOp::ArgMax, SupOp::ArgMin}) {
        if (!emit(join(reverse(relation(table.column_names[a])),
                       superlative(op, relation(kAllRows),
                                   row_number_relation(table.column_names[m])))))
          return out;
      }
    }
  }

  // comparison counts over numeric columns
  for (int m = 0; m < table.col_count(); ++m) {
    if (!numeric_column(table, m)) continue;
    for (const auto& v : distinct_cells(table, m)) {
      for (CmpOp op : {CmpOp::Gt, CmpOp::Lt}) {
        if (!emit(aggregation(AggOp::Count,
                              join(relation(table.column_names[m]), comparison(op, value(v))))))
          return out;
      }
    }
  }

  return out;
}

}  // namespace tableqa::harness

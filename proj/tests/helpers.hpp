#pragma once

// Shared test utilities: an independent naive interpreter used as the
// executor oracle, random table / logical-form generators, and the golden
// paraphrase corpus.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tableqa/executor.hpp"
#include "tableqa/lf.hpp"
#include "tableqa/table.hpp"

namespace testing_support {

using namespace tableqa;

// ---------------------------------------------------------------------------
// Naive interpreter, written straight from the denotational rules. It uses
// its own set representation and recursion; only the value primitives
// (single_value_match, compare_values) are shared with the library.

struct NaiveError {
  std::string msg;
};

struct NaiveSet {
  bool binary = false;
  // unary members
  std::vector<exec::Item> elems;
  // binary members
  std::vector<std::pair<exec::Item, exec::Item>> rel;
};

class NaiveInterp {
 public:
  explicit NaiveInterp(const Table& t) : t_(t) {}

  NaiveSet run(const lf::Node& n) { return walk(n); }

 private:
  const Table& t_;
  std::vector<std::pair<std::string, exec::Item>> env_;

  static bool item_eq_exact(const exec::Item& a, const exec::Item& b) {
    return exec::compare_items(a, b) == 0;
  }
  static bool item_match(const exec::Item& a, const exec::Item& b) {
    if (a.is_row != b.is_row) return false;
    if (a.is_row) return a.row == b.row;
    return single_value_match(a.val, b.val);
  }
  static void reject_mixed(const std::vector<exec::Item>& items) {
    bool rows = false, vals = false;
    for (const auto& e : items) (e.is_row ? rows : vals) = true;
    if (rows && vals) throw NaiveError{"mixed rows and values"};
  }

  static void dedupe(std::vector<exec::Item>& v) {
    std::sort(v.begin(), v.end(),
              [](const exec::Item& a, const exec::Item& b) { return exec::compare_items(a, b) < 0; });
    v.erase(std::unique(v.begin(), v.end(), item_eq_exact), v.end());
  }
  static void dedupe(std::vector<std::pair<exec::Item, exec::Item>>& v) {
    auto lt = [](const auto& a, const auto& b) {
      int c = exec::compare_items(a.first, b.first);
      if (c != 0) return c < 0;
      return exec::compare_items(a.second, b.second) < 0;
    };
    auto eq = [](const auto& a, const auto& b) {
      return exec::compare_items(a.first, b.first) == 0 &&
             exec::compare_items(a.second, b.second) == 0;
    };
    std::sort(v.begin(), v.end(), lt);
    v.erase(std::unique(v.begin(), v.end(), eq), v.end());
  }

  std::vector<CellValue> all_values() const {
    std::vector<CellValue> vals;
    for (const auto& row : t_.rows)
      for (const auto& c : row) vals.push_back(c);
    for (int i = 0; i < t_.row_count(); ++i) vals.push_back(CellValue::number(i));
    std::sort(vals.begin(), vals.end(),
              [](const CellValue& a, const CellValue& b) { return compare_values(a, b) < 0; });
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](const CellValue& a, const CellValue& b) {
                             return compare_values(a, b) == 0;
                           }),
               vals.end());
    return vals;
  }

  static std::optional<int> order(const CellValue& a, const CellValue& b) {
    if (a.kind == ValueKind::Number && b.kind == ValueKind::Number) {
      if (std::fabs(a.num - b.num) <= 1e-6) return 0;
      return a.num < b.num ? -1 : 1;
    }
    if (a.kind == ValueKind::Date && b.kind == ValueKind::Date) {
      int shared = 0;
      auto one = [&](std::optional<int> x, std::optional<int> y) -> int {
        if (!x || !y) return 0;
        ++shared;
        return *x == *y ? 0 : (*x < *y ? -1 : 1);
      };
      int c = one(a.date.year, b.date.year);
      if (c == 0) c = one(a.date.month, b.date.month);
      if (c == 0) c = one(a.date.day, b.date.day);
      if (shared == 0) return std::nullopt;
      return c;
    }
    return std::nullopt;
  }

  NaiveSet walk(const lf::Node& n) {
    using lf::Kind;
    switch (n.kind) {
      case Kind::Value: {
        NaiveSet s;
        s.elems.push_back(exec::Item::of_value(n.value));
        return s;
      }
      case Kind::Var: {
        for (auto it = env_.rbegin(); it != env_.rend(); ++it)
          if (it->first == n.name) {
            NaiveSet s;
            s.elems.push_back(it->second);
            return s;
          }
        throw NaiveError{"unbound var"};
      }
      case Kind::Relation: {
        NaiveSet s;
        if (n.name == lf::kAllRows) {
          for (int i = 0; i < t_.row_count(); ++i) s.elems.push_back(exec::Item::of_row(i));
          return s;
        }
        s.binary = true;
        if (n.name == lf::kIndex) {
          for (int i = 0; i < t_.row_count(); ++i)
            s.rel.emplace_back(exec::Item::of_row(i), exec::Item::of_value(CellValue::number(i)));
        } else if (n.name == lf::kNext) {
          for (int i = 0; i + 1 < t_.row_count(); ++i)
            s.rel.emplace_back(exec::Item::of_row(i), exec::Item::of_row(i + 1));
        } else if (n.name == lf::kNumberCast || n.name == lf::kDateCast) {
          ValueKind want = n.name == lf::kNumberCast ? ValueKind::Number : ValueKind::Date;
          for (const auto& v : all_values())
            if (v.kind == want) s.rel.emplace_back(exec::Item::of_value(v), exec::Item::of_value(v));
        } else {
          auto col = t_.column_index(n.name);
          if (!col) throw NaiveError{"unknown relation"};
          for (int i = 0; i < t_.row_count(); ++i)
            s.rel.emplace_back(exec::Item::of_row(i), exec::Item::of_value(t_.rows[i][*col]));
        }
        dedupe(s.rel);
        return s;
      }
      case Kind::Join: {
        NaiveSet rel = walk(*n.a);
        if (!rel.binary) throw NaiveError{"join needs binary"};
        NaiveSet child = walk(*n.b);
        if (child.binary) throw NaiveError{"join child must be unary"};
        NaiveSet out;
        for (const auto& pr : rel.rel)
          for (const auto& u : child.elems)
            if (item_match(pr.second, u)) out.elems.push_back(pr.first);
        dedupe(out.elems);
        reject_mixed(out.elems);
        return out;
      }
      case Kind::Reverse: {
        NaiveSet child = walk(*n.a);
        if (!child.binary) throw NaiveError{"reverse needs binary"};
        NaiveSet out;
        out.binary = true;
        for (const auto& pr : child.rel) out.rel.emplace_back(pr.second, pr.first);
        dedupe(out.rel);
        return out;
      }
      case Kind::Lambda: {
        NaiveSet out;
        out.binary = true;
        std::vector<exec::Item> universe;
        for (int i = 0; i < t_.row_count(); ++i) universe.push_back(exec::Item::of_row(i));
        for (const auto& v : all_values()) universe.push_back(exec::Item::of_value(v));
        for (const auto& x : universe) {
          env_.emplace_back(n.name, x);
          NaiveSet body = walk(*n.a);
          env_.pop_back();
          if (body.binary) throw NaiveError{"lambda body must be unary"};
          for (const auto& w : body.elems) out.rel.emplace_back(w, x);
        }
        dedupe(out.rel);
        return out;
      }
      case Kind::Merge: {
        NaiveSet l = walk(*n.a);
        NaiveSet r = walk(*n.b);
        bool l_empty = l.elems.empty() && l.rel.empty();
        bool r_empty = r.elems.empty() && r.rel.empty();
        if (l.binary != r.binary) {
          if (l_empty) return n.merge == lf::MergeOp::And ? l : r;
          if (r_empty) return n.merge == lf::MergeOp::And ? r : l;
          throw NaiveError{"merge kind mismatch"};
        }
        NaiveSet out;
        out.binary = l.binary;
        if (l.binary) {
          for (const auto& p : l.rel) {
            bool in_r = false;
            for (const auto& q : r.rel)
              if (item_eq_exact(p.first, q.first) && item_eq_exact(p.second, q.second)) in_r = true;
            if (n.merge == lf::MergeOp::And ? in_r : true) out.rel.push_back(p);
          }
          if (n.merge == lf::MergeOp::Or)
            for (const auto& q : r.rel) out.rel.push_back(q);
          dedupe(out.rel);
        } else {
          for (const auto& p : l.elems) {
            bool in_r = false;
            for (const auto& q : r.elems)
              if (item_eq_exact(p, q)) in_r = true;
            if (n.merge == lf::MergeOp::And ? in_r : true) out.elems.push_back(p);
          }
          if (n.merge == lf::MergeOp::Or)
            for (const auto& q : r.elems) out.elems.push_back(q);
          dedupe(out.elems);
          reject_mixed(out.elems);
        }
        return out;
      }
      case Kind::Aggregation: {
        NaiveSet c = walk(*n.a);
        if (c.binary) throw NaiveError{"aggregation over binary"};
        NaiveSet out;
        if (n.agg == lf::AggOp::Count) {
          out.elems.push_back(exec::Item::of_value(CellValue::number(double(c.elems.size()))));
          return out;
        }
        if (c.elems.empty()) throw NaiveError{"aggregation over empty"};
        std::vector<double> nums;
        for (const auto& e : c.elems) {
          if (e.is_row || e.val.kind != ValueKind::Number) throw NaiveError{"non-numeric agg"};
          nums.push_back(e.val.num);
        }
        double v = 0;
        switch (n.agg) {
          case lf::AggOp::Max: v = *std::max_element(nums.begin(), nums.end()); break;
          case lf::AggOp::Min: v = *std::min_element(nums.begin(), nums.end()); break;
          case lf::AggOp::Sum:
            for (double x : nums) v += x;
            break;
          case lf::AggOp::Avg: {
            for (double x : nums) v += x;
            v /= double(nums.size());
            break;
          }
          default: break;
        }
        if (!std::isfinite(v)) throw NaiveError{"non-finite"};
        out.elems.push_back(exec::Item::of_value(CellValue::number(v)));
        return out;
      }
      case Kind::Arithmetic: {
        auto single = [&](const lf::Node& side) {
          NaiveSet s = walk(side);
          if (s.binary || s.elems.size() != 1 || s.elems[0].is_row ||
              s.elems[0].val.kind != ValueKind::Number)
            throw NaiveError{"arith needs singleton number"};
          return s.elems[0].val.num;
        };
        double l = single(*n.a), r = single(*n.b);
        double v = n.arith == lf::ArithOp::Plus ? l + r : l - r;
        if (!std::isfinite(v)) throw NaiveError{"non-finite"};
        NaiveSet out;
        out.elems.push_back(exec::Item::of_value(CellValue::number(v)));
        return out;
      }
      case Kind::Comparison: {
        NaiveSet pivot = walk(*n.a);
        if (pivot.binary || pivot.elems.size() != 1 || pivot.elems[0].is_row)
          throw NaiveError{"comparison needs single value"};
        const CellValue& v = pivot.elems[0].val;
        NaiveSet out;
        for (const auto& u : all_values()) {
          bool keep = false;
          if (n.cmp == lf::CmpOp::Ne && u.kind == ValueKind::Text && v.kind == ValueKind::Text) {
            keep = u.norm != v.norm;
          } else if (auto c = order(u, v)) {
            switch (n.cmp) {
              case lf::CmpOp::Lt: keep = *c < 0; break;
              case lf::CmpOp::Le: keep = *c <= 0; break;
              case lf::CmpOp::Gt: keep = *c > 0; break;
              case lf::CmpOp::Ge: keep = *c >= 0; break;
              case lf::CmpOp::Ne: keep = *c != 0; break;
            }
          }
          if (keep) out.elems.push_back(exec::Item::of_value(u));
        }
        dedupe(out.elems);
        return out;
      }
      case Kind::Superlative: {
        NaiveSet u = walk(*n.a);
        if (u.binary) throw NaiveError{"superlative over binary"};
        NaiveSet rel = walk(*n.b);
        if (!rel.binary) throw NaiveError{"superlative relation must be binary"};
        dedupe(u.elems);  // canonical order for tie-breaking
        std::optional<double> best;
        std::optional<exec::Item> pick;
        for (const auto& x : u.elems) {
          std::optional<double> key;
          for (const auto& pr : rel.rel) {
            if (!item_match(pr.first, x)) continue;
            if (pr.second.is_row || pr.second.val.kind != ValueKind::Number) continue;
            double v = pr.second.val.num;
            if (!key || (n.sup == lf::SupOp::ArgMax ? v > *key : v < *key)) key = v;
          }
          if (!key) continue;
          if (!best || (n.sup == lf::SupOp::ArgMax ? *key > *best : *key < *best)) {
            best = key;
            pick = x;
          }
        }
        NaiveSet out;
        if (pick) out.elems.push_back(*pick);
        return out;
      }
    }
    throw NaiveError{"unreachable"};
  }
};

// Runs both interpreters; returns true when they agree (same denotation, or
// both raise an error).
inline bool agree_with_oracle(const lf::LogicalForm& z, const Table& t, std::string* note = nullptr) {
  std::optional<exec::Denotation> real;
  bool real_err = false;
  try {
    real = exec::execute(z, t);
  } catch (const std::exception&) {
    real_err = true;
  }
  std::optional<NaiveSet> naive;
  bool naive_err = false;
  try {
    NaiveInterp ni(t);
    naive = ni.run(*z.root);
  } catch (const NaiveError&) {
    naive_err = true;
  } catch (const std::exception&) {
    naive_err = true;
  }
  if (real_err != naive_err) {
    if (note) *note = real_err ? "library errored, oracle did not" : "oracle errored, library did not";
    return false;
  }
  if (real_err) return true;
  // classify naive result the same way
  exec::Denotation want;
  if (naive->binary) {
    want.kind = exec::Denotation::Kind::Pairs;
    want.pairs = naive->rel;
  } else {
    bool any_row = false, any_val = false;
    for (const auto& e : naive->elems) (e.is_row ? any_row : any_val) = true;
    if (any_row && any_val) {
      if (note) *note = "oracle produced mixed set";
      return false;
    }
    want.kind = any_row ? exec::Denotation::Kind::Rows : exec::Denotation::Kind::Entities;
    want.items = naive->elems;
  }
  bool same = exec::denotation_equal(*real, want);
  if (!same && note) *note = "denotations differ";
  return same;
}

// ---------------------------------------------------------------------------
// Random tables and logical forms.

struct LfGen {
  std::mt19937_64 g;
  const Table& t;

  explicit LfGen(const Table& table, uint64_t seed) : g(seed), t(table) {}

  int pick(int n) { return static_cast<int>(g() % static_cast<uint64_t>(n)); }

  CellValue random_value() {
    if (t.row_count() > 0 && pick(3) != 0) {
      int r = pick(t.row_count());
      int c = pick(t.col_count());
      return t.rows[r][c];
    }
    return CellValue::number(pick(20) - 5);
  }

  std::string random_column() { return t.column_names[pick(t.col_count())]; }

  lf::NodePtr gen_binary(int depth) {
    switch (pick(depth > 0 ? 6 : 4)) {
      case 0: return lf::relation(random_column());
      case 1: return lf::relation(lf::kIndex);
      case 2: return lf::relation(pick(2) ? lf::kNumberCast : lf::kNext);
      case 3: return lf::reverse(lf::relation(random_column()));
      case 4: return lf::reverse(gen_binary(depth - 1));
      default: {
        // R[lambda x [col.(cast.)x]]
        lf::NodePtr inner = lf::var("x");
        if (pick(2)) inner = lf::join(lf::relation(lf::kNumberCast), std::move(inner));
        return lf::reverse(lf::lambda("x", lf::join(lf::relation(random_column()), std::move(inner))));
      }
    }
  }

  lf::NodePtr gen_unary(int depth) {
    if (depth <= 0) {
      switch (pick(3)) {
        case 0: return lf::value(random_value());
        case 1: return lf::relation(lf::kAllRows);
        default: return lf::join(lf::relation(random_column()), lf::value(random_value()));
      }
    }
    switch (pick(8)) {
      case 0: return lf::join(gen_binary(depth - 1), gen_unary(depth - 1));
      case 1:
        return lf::join(gen_binary(depth - 1),
                        lf::comparison(static_cast<lf::CmpOp>(pick(5)), lf::value(random_value())));
      case 2: return lf::aggregation(lf::AggOp::Count, gen_unary(depth - 1));
      case 3:
        return lf::aggregation(static_cast<lf::AggOp>(1 + pick(4)), gen_unary(depth - 1));
      case 4:
        return lf::merge(pick(2) ? lf::MergeOp::And : lf::MergeOp::Or, gen_unary(depth - 1),
                         gen_unary(depth - 1));
      case 5:
        return lf::superlative(pick(2) ? lf::SupOp::ArgMax : lf::SupOp::ArgMin,
                               gen_unary(depth - 1), gen_binary(depth - 1));
      case 6:
        return lf::arithmetic(pick(2) ? lf::ArithOp::Plus : lf::ArithOp::Minus,
                              lf::aggregation(lf::AggOp::Count, gen_unary(depth - 1)),
                              lf::aggregation(lf::AggOp::Count, gen_unary(depth - 1)));
      default: return gen_unary(depth - 1);
    }
  }
};

inline Table random_table(std::mt19937_64& g, int max_rows = 6, int max_cols = 4) {
  static const char* words[] = {"ant", "bee", "cat", "dog", "elk", "fox"};
  int rows = 1 + static_cast<int>(g() % static_cast<uint64_t>(max_rows));
  int cols = 1 + static_cast<int>(g() % static_cast<uint64_t>(max_cols));
  std::string content;
  for (int c = 0; c < cols; ++c) {
    if (c) content += "\t";
    content += "c" + std::to_string(c);
  }
  content += "\n";
  // column 0 text, remaining columns alternate numeric / text / date
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) content += "\t";
      if (c == 0) content += words[g() % 6];
      else if (c % 3 == 1) content += std::to_string(static_cast<int>(g() % 50));
      else if (c % 3 == 2) content += words[g() % 6];
      else content += std::to_string(1 + static_cast<int>(g() % 12)) + " " +
                      std::to_string(1990 + static_cast<int>(g() % 20));
    }
    content += "\n";
  }
  return parse_table(content, TableFormat::Tsv, "random");
}

// ---------------------------------------------------------------------------
// Golden paraphrase corpus: hand-written trees with their published strings.

struct GoldenCase {
  std::string label;
  lf::LogicalForm z;
  std::string expected;
};

inline std::vector<GoldenCase> golden_paraphrases() {
  using namespace tableqa::lf;
  std::vector<GoldenCase> out;

  // attendance of the last rolling stones concert
  out.push_back({"attendance",
                 LogicalForm(join(
                     reverse(lambda("x", join(relation("attendance"),
                                              join(relation(kNumberCast), var("x"))))),
                     superlative(SupOp::ArgMax,
                                 join(relation("act"), value(CellValue::text("Rolling Stones"))),
                                 relation(kIndex)))),
                 "attendance as number of last table row where act is rolling stones"});

  out.push_back({"association last row",
                 LogicalForm(join(reverse(relation("association")),
                                  superlative(SupOp::ArgMax, relation(kAllRows), relation(kIndex)))),
                 "association of last row"});

  out.push_back(
      {"association highest joining year",
       LogicalForm(join(
           reverse(relation("association")),
           superlative(SupOp::ArgMax, relation(kAllRows),
                       reverse(lambda("x", join(reverse(relation(kNumberCast)),
                                                join(reverse(relation("joining_year")), var("x")))))))),
       "association of row with highest number of joining year"});

  out.push_back({"count all rows",
                 LogicalForm(aggregation(AggOp::Count, relation(kAllRows))),
                 "count all rows"});

  out.push_back({"number of total",
                 LogicalForm(join(reverse(relation(kNumberCast)),
                                  join(reverse(relation("total")),
                                       join(relation("nation"), value(CellValue::text("total")))))),
                 "number of total of nation is total"});

  out.push_back({"count dates le",
                 LogicalForm(aggregation(
                     AggOp::Count,
                     join(relation("original_air_date"),
                          join(relation(kDateCast),
                               comparison(CmpOp::Le, value(CellValue::make_date(
                                                         Date{1965, 12, std::nullopt}))))))),
                 "count original air date as date <= 12 1965"});

  out.push_back({"count dates lt",
                 LogicalForm(aggregation(
                     AggOp::Count,
                     join(relation("original_air_date"),
                          join(relation(kDateCast),
                               comparison(CmpOp::Lt, value(CellValue::make_date(
                                                         Date{1965, 12, std::nullopt}))))))),
                 "count original air date as date < 12 1965"});

  return out;
}

}  // namespace testing_support

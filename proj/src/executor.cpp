#include "tableqa/executor.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace tableqa::exec {

namespace {

constexpr double kNumTolerance = 1e-6;

// Internal result: a unary set or a pair set.
struct Deno {
  bool binary = false;
  std::vector<Item> items;
  std::vector<std::pair<Item, Item>> pairs;
};

int compare_pairs(const std::pair<Item, Item>& a, const std::pair<Item, Item>& b) {
  int c = compare_items(a.first, b.first);
  if (c != 0) return c;
  return compare_items(a.second, b.second);
}

void sort_unique(std::vector<Item>& v) {
  std::sort(v.begin(), v.end(), [](const Item& a, const Item& b) { return compare_items(a, b) < 0; });
  v.erase(std::unique(v.begin(), v.end(),
                      [](const Item& a, const Item& b) { return compare_items(a, b) == 0; }),
          v.end());
}

void sort_unique(std::vector<std::pair<Item, Item>>& v) {
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return compare_pairs(a, b) < 0; });
  v.erase(std::unique(v.begin(), v.end(),
                      [](const auto& a, const auto& b) { return compare_pairs(a, b) == 0; }),
          v.end());
}

// Tolerant match used for join membership; set storage stays exact.
bool items_match(const Item& a, const Item& b) {
  if (a.is_row != b.is_row) return false;
  if (a.is_row) return a.row == b.row;
  return single_value_match(a.val, b.val);
}

// A unary denotation is either rows or values, never both.
void ensure_unmixed(const std::vector<Item>& items) {
  bool any_row = false, any_val = false;
  for (const auto& it : items) (it.is_row ? any_row : any_val) = true;
  if (any_row && any_val) throw DataError("mixed denotation of rows and values");
}

// -1 / 0 / 1 when comparable, nullopt otherwise. Dates compare only over
// mutually specified components.
std::optional<int> order_values(const CellValue& a, const CellValue& b) {
  if (a.kind == ValueKind::Number && b.kind == ValueKind::Number) {
    if (std::fabs(a.num - b.num) <= kNumTolerance) return 0;
    return a.num < b.num ? -1 : 1;
  }
  if (a.kind == ValueKind::Date && b.kind == ValueKind::Date) {
    int mutual = 0;
    auto cmp_part = [&](const std::optional<int>& x, const std::optional<int>& y) -> int {
      if (!x || !y) return 0;
      ++mutual;
      if (*x != *y) return *x < *y ? -1 : 1;
      return 0;
    };
    if (int c = cmp_part(a.date.year, b.date.year); c != 0) return c;
    if (int c = cmp_part(a.date.month, b.date.month); c != 0) return c;
    if (int c = cmp_part(a.date.day, b.date.day); c != 0) return c;
    if (mutual == 0) return std::nullopt;
    return 0;
  }
  return std::nullopt;
}

bool cmp_holds(const CellValue& x, lf::CmpOp op, const CellValue& v) {
  if (op == lf::CmpOp::Ne) {
    if (x.kind == ValueKind::Text && v.kind == ValueKind::Text) return x.norm != v.norm;
    auto c = order_values(x, v);
    return c.has_value() && *c != 0;
  }
  auto c = order_values(x, v);
  if (!c) return false;
  switch (op) {
    case lf::CmpOp::Lt: return *c < 0;
    case lf::CmpOp::Le: return *c <= 0;
    case lf::CmpOp::Gt: return *c > 0;
    case lf::CmpOp::Ge: return *c >= 0;
    default: return false;
  }
}

class Evaluator {
 public:
  explicit Evaluator(const Table& t) : table_(t) {}

  Deno eval(const lf::Node& n) {
    switch (n.kind) {
      case lf::Kind::Value: {
        Deno d;
        d.items.push_back(Item::of_value(n.value));
        return d;
      }
      case lf::Kind::Var: return eval_var(n);
      case lf::Kind::Relation: return eval_relation(n);
      case lf::Kind::Join: return eval_join(n);
      case lf::Kind::Reverse: return eval_reverse(n);
      case lf::Kind::Lambda: return eval_lambda(n);
      case lf::Kind::Merge: return eval_merge(n);
      case lf::Kind::Aggregation: return eval_aggregation(n);
      case lf::Kind::Arithmetic: return eval_arithmetic(n);
      case lf::Kind::Comparison: return eval_comparison(n);
      case lf::Kind::Superlative: return eval_superlative(n);
    }
    throw DataError("unhandled node kind");
  }

 private:
  const Table& table_;
  std::vector<std::pair<std::string, Item>> bound_;

  const std::vector<CellValue>& value_universe() {
    if (universe_.empty() && !universe_built_) {
      universe_ = table_.value_universe();
      universe_built_ = true;
    }
    return universe_;
  }
  std::vector<CellValue> universe_;
  bool universe_built_ = false;

  Deno eval_var(const lf::Node& n) {
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
      if (it->first == n.name) {
        Deno d;
        d.items.push_back(it->second);
        return d;
      }
    }
    throw DataError("unbound variable '" + n.name + "'");
  }

  Deno eval_relation(const lf::Node& n) {
    Deno d;
    if (n.name == lf::kAllRows) {
      for (int i = 0; i < table_.row_count(); ++i) d.items.push_back(Item::of_row(i));
      return d;
    }
    d.binary = true;
    if (n.name == lf::kIndex) {
      for (int i = 0; i < table_.row_count(); ++i)
        d.pairs.emplace_back(Item::of_row(i), Item::of_value(CellValue::number(i)));
      return d;
    }
    if (n.name == lf::kNext) {
      for (int i = 0; i + 1 < table_.row_count(); ++i)
        d.pairs.emplace_back(Item::of_row(i), Item::of_row(i + 1));
      return d;
    }
    if (n.name == lf::kNumberCast || n.name == lf::kDateCast) {
      ValueKind want = n.name == lf::kNumberCast ? ValueKind::Number : ValueKind::Date;
      for (const auto& v : value_universe())
        if (v.kind == want)
          d.pairs.emplace_back(Item::of_value(v), Item::of_value(v));
      sort_unique(d.pairs);
      return d;
    }
    auto col = table_.column_index(n.name);
    if (!col) throw DataError("unknown relation '" + n.name + "'");
    for (int i = 0; i < table_.row_count(); ++i)
      d.pairs.emplace_back(Item::of_row(i), Item::of_value(table_.rows[i][*col]));
    return d;
  }

  Deno eval_join(const lf::Node& n) {
    Deno rel = eval(*n.a);
    if (!rel.binary) throw DataError("join requires a binary relation");
    Deno child = eval(*n.b);
    if (child.binary) throw DataError("join child must be unary");
    Deno out;
    for (const auto& [l, r] : rel.pairs) {
      for (const auto& u : child.items) {
        if (items_match(r, u)) {
          out.items.push_back(l);
          break;
        }
      }
    }
    sort_unique(out.items);
    ensure_unmixed(out.items);
    return out;
  }

  Deno eval_reverse(const lf::Node& n) {
    Deno child = eval(*n.a);
    if (!child.binary) throw DataError("reverse requires a binary relation");
    Deno out;
    out.binary = true;
    out.pairs.reserve(child.pairs.size());
    for (const auto& [l, r] : child.pairs) out.pairs.emplace_back(r, l);
    sort_unique(out.pairs);
    return out;
  }

  Deno eval_lambda(const lf::Node& n) {
    // lambda x.body denotes the pairs (w, x) with w in body(x); x ranges over
    // the finite universe of rows and table values.
    std::vector<Item> universe;
    for (int i = 0; i < table_.row_count(); ++i) universe.push_back(Item::of_row(i));
    for (const auto& v : value_universe()) universe.push_back(Item::of_value(v));

    Deno out;
    out.binary = true;
    for (const auto& x : universe) {
      bound_.emplace_back(n.name, x);
      Deno body = eval(*n.a);
      bound_.pop_back();
      if (body.binary) throw DataError("lambda body must be unary");
      for (const auto& w : body.items) out.pairs.emplace_back(w, x);
    }
    sort_unique(out.pairs);
    return out;
  }

  Deno eval_merge(const lf::Node& n) {
    Deno l = eval(*n.a);
    Deno r = eval(*n.b);
    if (l.binary != r.binary) {
      // an empty set merges with anything
      if (l.items.empty() && l.pairs.empty()) return n.merge == lf::MergeOp::And ? l : r;
      if (r.items.empty() && r.pairs.empty()) return n.merge == lf::MergeOp::And ? r : l;
      throw DataError("merge of unary and binary denotations");
    }
    Deno out;
    out.binary = l.binary;
    if (l.binary) {
      if (n.merge == lf::MergeOp::And) {
        std::set_intersection(l.pairs.begin(), l.pairs.end(), r.pairs.begin(), r.pairs.end(),
                              std::back_inserter(out.pairs),
                              [](const auto& a, const auto& b) { return compare_pairs(a, b) < 0; });
      } else {
        std::set_union(l.pairs.begin(), l.pairs.end(), r.pairs.begin(), r.pairs.end(),
                       std::back_inserter(out.pairs),
                       [](const auto& a, const auto& b) { return compare_pairs(a, b) < 0; });
      }
    } else {
      if (n.merge == lf::MergeOp::And) {
        std::set_intersection(l.items.begin(), l.items.end(), r.items.begin(), r.items.end(),
                              std::back_inserter(out.items),
                              [](const Item& a, const Item& b) { return compare_items(a, b) < 0; });
      } else {
        std::set_union(l.items.begin(), l.items.end(), r.items.begin(), r.items.end(),
                       std::back_inserter(out.items),
                       [](const Item& a, const Item& b) { return compare_items(a, b) < 0; });
      }
      ensure_unmixed(out.items);
    }
    return out;
  }

  Deno eval_aggregation(const lf::Node& n) {
    Deno child = eval(*n.a);
    if (child.binary) throw DataError("aggregation over a binary denotation");
    Deno out;
    if (n.agg == lf::AggOp::Count) {
      out.items.push_back(Item::of_value(CellValue::number(static_cast<double>(child.items.size()))));
      return out;
    }
    if (child.items.empty()) throw DataError("aggregation over empty set");
    double acc = n.agg == lf::AggOp::Min ? std::numeric_limits<double>::infinity()
               : n.agg == lf::AggOp::Max ? -std::numeric_limits<double>::infinity()
                                         : 0.0;
    for (const auto& it : child.items) {
      if (it.is_row || it.val.kind != ValueKind::Number)
        throw DataError("aggregation over non-numeric set");
      double v = it.val.num;
      switch (n.agg) {
        case lf::AggOp::Max: acc = std::max(acc, v); break;
        case lf::AggOp::Min: acc = std::min(acc, v); break;
        default: acc += v; break;
      }
    }
    if (n.agg == lf::AggOp::Avg) acc /= static_cast<double>(child.items.size());
    if (!std::isfinite(acc)) throw DataError("non-finite aggregation result");
    out.items.push_back(Item::of_value(CellValue::number(acc)));
    return out;
  }

  Deno eval_arithmetic(const lf::Node& n) {
    auto scalar = [&](const lf::Node& side) {
      Deno d = eval(side);
      if (d.binary || d.items.size() != 1 || d.items[0].is_row ||
          d.items[0].val.kind != ValueKind::Number)
        throw DataError("arithmetic over non-singleton numeric denotation");
      return d.items[0].val.num;
    };
    double l = scalar(*n.a);
    double r = scalar(*n.b);
    double v = n.arith == lf::ArithOp::Plus ? l + r : l - r;
    if (!std::isfinite(v)) throw DataError("non-finite arithmetic result");
    Deno out;
    out.items.push_back(Item::of_value(CellValue::number(v)));
    return out;
  }

  Deno eval_comparison(const lf::Node& n) {
    Deno v = eval(*n.a);
    if (v.binary || v.items.size() != 1 || v.items[0].is_row)
      throw DataError("comparison needs a single value");
    const CellValue& pivot = v.items[0].val;
    Deno out;
    for (const auto& u : value_universe())
      if (cmp_holds(u, n.cmp, pivot)) out.items.push_back(Item::of_value(u));
    sort_unique(out.items);
    return out;
  }

  Deno eval_superlative(const lf::Node& n) {
    Deno u = eval(*n.a);
    if (u.binary) throw DataError("superlative over a binary denotation");
    Deno rel = eval(*n.b);
    if (!rel.binary) throw DataError("superlative relation must be binary");

    bool found = false;
    double best_key = 0;
    Item best;
    for (const auto& x : u.items) {  // canonical order breaks ties
      bool has_key = false;
      double key = 0;
      for (const auto& [l, r] : rel.pairs) {
        if (!items_match(l, x)) continue;
        if (r.is_row || r.val.kind != ValueKind::Number) continue;
        double v = r.val.num;
        if (!has_key) { key = v; has_key = true; }
        else if (n.sup == lf::SupOp::ArgMax ? v > key : v < key) key = v;
      }
      if (!has_key) continue;
      bool better = !found || (n.sup == lf::SupOp::ArgMax ? key > best_key : key < best_key);
      if (better) {
        found = true;
        best_key = key;
        best = x;
      }
    }
    Deno out;
    if (found) out.items.push_back(best);
    return out;
  }
};

}  // namespace

int compare_items(const Item& a, const Item& b) {
  if (a.is_row != b.is_row) return a.is_row ? -1 : 1;
  if (a.is_row) return a.row < b.row ? -1 : (a.row == b.row ? 0 : 1);
  return compare_values(a.val, b.val);
}

std::vector<CellValue> Denotation::entities() const {
  std::vector<CellValue> out;
  for (const auto& it : items)
    if (!it.is_row) out.push_back(it.val);
  return out;
}

std::vector<int> Denotation::row_indices() const {
  std::vector<int> out;
  for (const auto& it : items)
    if (it.is_row) out.push_back(it.row);
  return out;
}

bool denotation_equal(const Denotation& a, const Denotation& b) {
  if (a.kind != b.kind) return false;
  if (a.items.size() != b.items.size() || a.pairs.size() != b.pairs.size()) return false;
  for (size_t i = 0; i < a.items.size(); ++i)
    if (compare_items(a.items[i], b.items[i]) != 0) return false;
  for (size_t i = 0; i < a.pairs.size(); ++i) {
    if (compare_items(a.pairs[i].first, b.pairs[i].first) != 0) return false;
    if (compare_items(a.pairs[i].second, b.pairs[i].second) != 0) return false;
  }
  return true;
}

Denotation execute(const lf::LogicalForm& z, const Table& table) {
  if (!z.root) throw DataError("empty logical form");
  Evaluator ev(table);
  Deno d = ev.eval(*z.root);
  Denotation out;
  if (d.binary) {
    out.kind = Denotation::Kind::Pairs;
    out.pairs = std::move(d.pairs);
    return out;
  }
  bool any_row = false, any_val = false;
  for (const auto& it : d.items) (it.is_row ? any_row : any_val) = true;
  if (any_row && any_val) throw DataError("mixed denotation of rows and values");
  out.kind = any_row ? Denotation::Kind::Rows : Denotation::Kind::Entities;
  out.items = std::move(d.items);
  return out;
}

std::vector<CellValue> answer_of(const lf::LogicalForm& z, const Table& table) {
  Denotation d = execute(z, table);
  if (d.kind == Denotation::Kind::Pairs)
    throw DataError("binary denotation cannot be flattened to an answer");
  std::vector<CellValue> out;
  if (d.kind == Denotation::Kind::Rows) {
    for (int r : d.row_indices()) out.push_back(table.rows[r][0]);
    std::sort(out.begin(), out.end(),
              [](const CellValue& a, const CellValue& b) { return compare_values(a, b) < 0; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const CellValue& a, const CellValue& b) {
                            return compare_values(a, b) == 0;
                          }),
              out.end());
    return out;
  }
  return d.entities();
}

}  // namespace tableqa::exec

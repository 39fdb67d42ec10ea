#include "tableqa/lf.hpp"

#include <algorithm>
#include <cctype>

namespace tableqa::lf {

bool is_builtin_relation(const std::string& name) {
  return name == kIndex || name == kNext || name == kAllRows ||
         name == kNumberCast || name == kDateCast;
}

NodePtr Node::clone() const {
  auto n = std::make_unique<Node>();
  n->kind = kind;
  n->agg = agg;
  n->arith = arith;
  n->merge = merge;
  n->sup = sup;
  n->cmp = cmp;
  n->name = name;
  n->value = value;
  if (a) n->a = a->clone();
  if (b) n->b = b->clone();
  return n;
}

NodePtr relation(std::string name) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Relation;
  n->name = std::move(name);
  return n;
}

NodePtr value(CellValue v) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Value;
  n->value = std::move(v);
  return n;
}

NodePtr var(std::string symbol) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Var;
  n->name = std::move(symbol);
  return n;
}

NodePtr aggregation(AggOp op, NodePtr child) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Aggregation;
  n->agg = op;
  n->a = std::move(child);
  return n;
}

NodePtr join(NodePtr rel, NodePtr child) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Join;
  n->a = std::move(rel);
  n->b = std::move(child);
  return n;
}

NodePtr reverse(NodePtr child) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Reverse;
  n->a = std::move(child);
  return n;
}

NodePtr lambda(std::string symbol, NodePtr body) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Lambda;
  n->name = std::move(symbol);
  n->a = std::move(body);
  return n;
}

NodePtr arithmetic(ArithOp op, NodePtr left, NodePtr right) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Arithmetic;
  n->arith = op;
  n->a = std::move(left);
  n->b = std::move(right);
  return n;
}

NodePtr merge(MergeOp op, NodePtr left, NodePtr right) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Merge;
  n->merge = op;
  n->a = std::move(left);
  n->b = std::move(right);
  return n;
}

NodePtr superlative(SupOp op, NodePtr value_set, NodePtr rel) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Superlative;
  n->sup = op;
  n->a = std::move(value_set);
  n->b = std::move(rel);
  return n;
}

NodePtr comparison(CmpOp op, NodePtr v) {
  auto n = std::make_unique<Node>();
  n->kind = Kind::Comparison;
  n->cmp = op;
  n->a = std::move(v);
  return n;
}

namespace {

void measure(const Node& n, int depth, int& count, int& max_depth) {
  ++count;
  max_depth = std::max(max_depth, depth);
  if (n.a) measure(*n.a, depth + 1, count, max_depth);
  if (n.b) measure(*n.b, depth + 1, count, max_depth);
}

}  // namespace

LogicalForm::LogicalForm(NodePtr r) : root(std::move(r)) {
  if (root) measure(*root, 1, node_count, depth);
}

bool equal(const Node& x, const Node& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::Aggregation:
      if (x.agg != y.agg) return false;
      break;
    case Kind::Arithmetic:
      if (x.arith != y.arith) return false;
      break;
    case Kind::Merge:
      if (x.merge != y.merge) return false;
      break;
    case Kind::Superlative:
      if (x.sup != y.sup) return false;
      break;
    case Kind::Comparison:
      if (x.cmp != y.cmp) return false;
      break;
    case Kind::Relation:
    case Kind::Var:
    case Kind::Lambda:
      if (x.name != y.name) return false;
      break;
    case Kind::Value: {
      if (x.value.kind != y.value.kind) return false;
      if (x.value.kind == ValueKind::Number && x.value.num != y.value.num) return false;
      if (x.value.kind == ValueKind::Date && !(x.value.date == y.value.date)) return false;
      if (x.value.kind == ValueKind::Text && x.value.norm != y.value.norm) return false;
      break;
    }
    default:
      break;
  }
  if (static_cast<bool>(x.a) != static_cast<bool>(y.a)) return false;
  if (static_cast<bool>(x.b) != static_cast<bool>(y.b)) return false;
  if (x.a && !equal(*x.a, *y.a)) return false;
  if (x.b && !equal(*x.b, *y.b)) return false;
  return true;
}

bool equal(const LogicalForm& x, const LogicalForm& y) {
  if (!x.root || !y.root) return x.root == y.root;
  return equal(*x.root, *y.root);
}

bool contains_kind(const Node& n, Kind k) {
  if (n.kind == k) return true;
  if (n.a && contains_kind(*n.a, k)) return true;
  if (n.b && contains_kind(*n.b, k)) return true;
  return false;
}

bool contains_relation(const Node& n, const std::string& name) {
  if (n.kind == Kind::Relation && n.name == name) return true;
  if (n.a && contains_relation(*n.a, name)) return true;
  if (n.b && contains_relation(*n.b, name)) return true;
  return false;
}

namespace {

const char* agg_name(AggOp op) {
  switch (op) {
    case AggOp::Count: return "count";
    case AggOp::Max: return "max";
    case AggOp::Min: return "min";
    case AggOp::Sum: return "sum";
    case AggOp::Avg: return "avg";
  }
  return "count";
}

const char* cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Ne: return "!=";
  }
  return "<";
}

bool keyword_like(const std::string& s) {
  static const char* words[] = {"count", "max",    "min",   "sum",    "avg",  "join",
                                "lambda", "plus",  "minus", "and",    "or",   "argmax",
                                "argmin", "r",     "index", "next",   "allrows",
                                "number", "date"};
  for (const char* w : words)
    if (s == w) return true;
  return false;
}

bool bare_emittable(const std::string& s) {
  if (s.size() < 2) return false;
  if (keyword_like(s)) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (unsigned char c : s)
    if (!std::islower(c) && !std::isdigit(c) && c != '_') return false;
  // must survive re-parsing as plain text
  return !try_parse_number(s) && !try_parse_date(s);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') { out += "\\n"; continue; }
    if (c == '\t') { out += "\\t"; continue; }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string ser_value(const CellValue& v) {
  switch (v.kind) {
    case ValueKind::Number: return format_number(v.num);
    case ValueKind::Date: {
      auto p = [](const std::optional<int>& c) { return c ? std::to_string(*c) : "-1"; };
      return "date(" + p(v.date.year) + "," + p(v.date.month) + "," + p(v.date.day) + ")";
    }
    case ValueKind::Text:
      return bare_emittable(v.norm) ? v.norm : quote(v.norm);
  }
  return quote(v.norm);
}

}  // namespace

std::string serialize(const Node& n) {
  switch (n.kind) {
    case Kind::Relation: return n.name;
    case Kind::Var: return n.name;
    case Kind::Value: return ser_value(n.value);
    case Kind::Aggregation: return std::string(agg_name(n.agg)) + "(" + serialize(*n.a) + ")";
    case Kind::Reverse: return "R[" + serialize(*n.a) + "]";
    case Kind::Lambda: return "lambda(" + n.name + "," + serialize(*n.a) + ")";
    case Kind::Arithmetic:
      return std::string(n.arith == ArithOp::Plus ? "plus" : "minus") + "(" + serialize(*n.a) +
             "," + serialize(*n.b) + ")";
    case Kind::Merge:
      return std::string(n.merge == MergeOp::And ? "and" : "or") + "(" + serialize(*n.a) + "," +
             serialize(*n.b) + ")";
    case Kind::Superlative:
      return std::string(n.sup == SupOp::ArgMax ? "argmax" : "argmin") + "(" + serialize(*n.a) +
             "," + serialize(*n.b) + ")";
    case Kind::Comparison: return std::string(cmp_symbol(n.cmp)) + serialize(*n.a);
    case Kind::Join: {
      bool dotted = n.a->kind == Kind::Relation || n.a->kind == Kind::Reverse;
      if (dotted) return serialize(*n.a) + "." + serialize(*n.b);
      return "join(" + serialize(*n.a) + "," + serialize(*n.b) + ")";
    }
  }
  return {};
}

std::string serialize(const LogicalForm& z) {
  if (!z.root) return {};
  return serialize(*z.root);
}

}  // namespace tableqa::lf

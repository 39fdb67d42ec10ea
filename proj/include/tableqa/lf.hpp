#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "tableqa/error.hpp"
#include "tableqa/value.hpp"

namespace tableqa::lf {

enum class Kind {
  Aggregation,
  Join,
  Reverse,
  Lambda,
  Arithmetic,
  Merge,
  Superlative,
  Comparison,
  Relation,
  Value,
  Var,
};

enum class AggOp { Count, Max, Min, Sum, Avg };
enum class ArithOp { Plus, Minus };
enum class MergeOp { And, Or };
enum class SupOp { ArgMax, ArgMin };
enum class CmpOp { Lt, Le, Gt, Ge, Ne };

// Builtin relation names. `index` maps row i to Number(i), `next` maps row i
// to row i+1, `allrows` is the unary set of all rows, `number`/`date` filter
// cell values by kind.
inline constexpr const char* kIndex = "index";
inline constexpr const char* kNext = "next";
inline constexpr const char* kAllRows = "allrows";
inline constexpr const char* kNumberCast = "number";
inline constexpr const char* kDateCast = "date";

bool is_builtin_relation(const std::string& name);

struct Node;
using NodePtr = std::unique_ptr<Node>;

/// One Lambda DCS tree node. Child slots by kind:
///   Aggregation/Reverse/Comparison: a = child
///   Lambda: name = variable, a = body
///   Join: a = relation, b = child
///   Arithmetic/Merge: a = left, b = right
///   Superlative: a = value set, b = relation
struct Node {
  Kind kind;
  AggOp agg{};
  ArithOp arith{};
  MergeOp merge{};
  SupOp sup{};
  CmpOp cmp{};
  std::string name;  // Relation name / variable symbol
  CellValue value;   // Value payload
  NodePtr a, b;

  NodePtr clone() const;
};

NodePtr relation(std::string name);
NodePtr value(CellValue v);
NodePtr var(std::string symbol);
NodePtr aggregation(AggOp op, NodePtr child);
NodePtr join(NodePtr rel, NodePtr child);
NodePtr reverse(NodePtr child);
NodePtr lambda(std::string symbol, NodePtr body);
NodePtr arithmetic(ArithOp op, NodePtr left, NodePtr right);
NodePtr merge(MergeOp op, NodePtr left, NodePtr right);
NodePtr superlative(SupOp op, NodePtr value_set, NodePtr rel);
NodePtr comparison(CmpOp op, NodePtr v);

struct LogicalForm {
  NodePtr root;
  int node_count = 0;
  int depth = 0;

  LogicalForm() = default;
  explicit LogicalForm(NodePtr r);
  LogicalForm(const LogicalForm& o) { *this = o; }
  LogicalForm& operator=(const LogicalForm& o) {
    if (this != &o) {
      root = o.root ? o.root->clone() : nullptr;
      node_count = o.node_count;
      depth = o.depth;
    }
    return *this;
  }
  LogicalForm(LogicalForm&&) = default;
  LogicalForm& operator=(LogicalForm&&) = default;

  LogicalForm clone() const { return *this; }
  bool valid() const { return root != nullptr; }
};

bool equal(const Node& x, const Node& y);
bool equal(const LogicalForm& x, const LogicalForm& y);
bool contains_kind(const Node& n, Kind k);
bool contains_relation(const Node& n, const std::string& name);

struct LfParseError : DataError {
  size_t offset;
  LfParseError(const std::string& msg, size_t off)
      : DataError(msg + " (offset " + std::to_string(off) + ")"), offset(off) {}
};

/// Canonical text form; parse_lf(serialize(z)) reproduces z structurally.
std::string serialize(const Node& n);
std::string serialize(const LogicalForm& z);

/// Grammar (whitespace-insensitive, identifiers case-insensitive):
///   chain  := element ('.' element)*            right-assoc joins
///   element:= R '[' chain ']' | lambda-form | call | cmp | literal | name
///   lambda := 'λ' sym '[' chain ']' | 'lambda' '(' sym ',' chain ')'
///             (only directly under R[...])
///   call   := agg '(' chain ')' | 'join' '(' chain ',' chain ')'
///           | arith|merge|sup '(' chain ',' chain ')'
///           | 'date' '(' y ',' m ',' d ')'      (-1 for unset parts)
///   cmp    := ('<'|'<='|'>'|'>='|'!=') literal
/// Bare camel-case identifiers split into words ("RollingStones" ->
/// "rolling stones"); quoted strings are always text values.
LogicalForm parse_lf(const std::string& text);

}  // namespace tableqa::lf

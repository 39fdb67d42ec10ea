#pragma once

#include <utility>
#include <vector>

#include "tableqa/lf.hpp"
#include "tableqa/table.hpp"

namespace tableqa::exec {

/// A denotation element: either a table row or a plain value.
struct Item {
  bool is_row = false;
  int row = -1;
  CellValue val;

  static Item of_row(int r) {
    Item it;
    it.is_row = true;
    it.row = r;
    return it;
  }
  static Item of_value(CellValue v) {
    Item it;
    it.val = std::move(v);
    return it;
  }
};

/// Exact total order; rows sort before values.
int compare_items(const Item& a, const Item& b);

struct Denotation {
  enum class Kind { Entities, Rows, Pairs };
  Kind kind = Kind::Entities;
  std::vector<Item> items;                    // unary kinds, sorted unique
  std::vector<std::pair<Item, Item>> pairs;   // Pairs kind, sorted unique

  bool empty() const { return items.empty() && pairs.empty(); }
  std::vector<CellValue> entities() const;
  std::vector<int> row_indices() const;
};

bool denotation_equal(const Denotation& a, const Denotation& b);

Denotation execute(const lf::LogicalForm& z, const Table& table);

/// Flattens a unary denotation to values; rows project to their
/// first-column cell. Canonical sorted order, duplicate-free.
std::vector<CellValue> answer_of(const lf::LogicalForm& z, const Table& table);

}  // namespace tableqa::exec

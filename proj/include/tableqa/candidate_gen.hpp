#pragma once

#include <string>
#include <vector>

#include "tableqa/table.hpp"

namespace tableqa::harness {

/// Deterministic template enumeration over the table: whole-table counts,
/// column lookups, value counts, first/last-row projections, numeric-column
/// superlatives, and comparison counts, capped at `budget`. Every emitted
/// string parses and executes on its table. The question is accepted for
/// interface parity but does not steer the enumeration.
std::vector<std::string> generate_candidates_minimal(const std::string& question,
                                                     const Table& table, int budget);

}  // namespace tableqa::harness

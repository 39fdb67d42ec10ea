#pragma once

#include <string>
#include <vector>

#include "tableqa/dataset.hpp"
#include "tableqa/executor.hpp"
#include "tableqa/lf.hpp"
#include "tableqa/paraphrase.hpp"
#include "tableqa/table.hpp"

namespace tableqa::train {

/// One candidate logical form for a question. Candidates that fail to parse
/// or execute stay in the list (they rank with score -inf) but are excluded
/// from training pairs.
struct Candidate {
  lf::LogicalForm form;         // set when executable
  std::string lf_text;          // as supplied
  std::string paraphrase_text;  // paraphrase, or canonical form without it
  int label = 0;                // 1 iff the execution matches gold
  int source_index = 0;
  bool executable = false;
  std::vector<CellValue> answer;
};

struct BuildStats {
  int parse_failures = 0;
  int exec_failures = 0;
};

std::vector<Candidate> build_candidates(const QAExample& ex,
                                        const std::vector<std::string>& lf_texts,
                                        const Table& table, bool use_paraphrase,
                                        const para::Lexicon& lex, BuildStats* stats = nullptr);

}  // namespace tableqa::train

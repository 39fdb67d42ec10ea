#pragma once

#include <map>
#include <string>
#include <vector>

#include "tableqa/candidates.hpp"
#include "tableqa/checkpoint.hpp"
#include "tableqa/dataset.hpp"
#include "tableqa/trainer.hpp"

namespace tableqa::harness {

/// One model or an ensemble; scores are the per-member mean.
struct Scorer {
  std::vector<const nn::LoadedModel*> members;

  void validate() const;
  std::vector<double> score_texts(const std::string& question,
                                  const std::vector<std::string>& texts) const;
};

struct RankedList {
  std::string id;
  std::vector<double> scores;  // aligned with the candidate list; -inf if unusable
  std::vector<int> order;      // candidate indices, best first
  int chosen = -1;
  std::vector<CellValue> answer;
  bool correct = false;
};

/// Deterministic ranking: score descending, ties to the lowest source index.
/// Candidates that failed to parse or execute score -inf but stay ranked.
RankedList rank_question(const std::string& id, const std::string& question,
                         const std::vector<train::Candidate>& candidates,
                         const std::vector<CellValue>& gold, const Scorer& scorer);

enum class Category { Lookup, AggregationNextPrev, Superlatives, ArithmeticComparisons };
const char* category_name(Category c);

/// Total and deterministic: superlative > arithmetic/comparison >
/// aggregation/next > lookup.
Category classify_lf(const lf::Node& n);

struct EvalReport {
  int n = 0;
  double p_at_1 = 0;
  double coverage = 0;  // questions with at least one positive candidate
  std::map<std::string, int> category_correct;
  int dropped_parse = 0;
  int dropped_exec = 0;
  std::vector<RankedList> per_question;
};

EvalReport evaluate(const std::vector<QAExample>& examples,
                    const std::vector<CandidateRecord>& records, const std::string& tables_dir,
                    const Scorer& scorer, bool use_paraphrase, const para::Lexicon& lex,
                    int threads);

std::string report_to_json(const EvalReport& r, bool include_per_question);

}  // namespace tableqa::harness

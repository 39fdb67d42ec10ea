#pragma once

#include <string>
#include <vector>

#include "tableqa/value.hpp"

namespace tableqa {

struct QAExample {
  std::string id;
  std::string question;
  std::string table_ref;          // path relative to the tables dir
  std::vector<CellValue> gold;    // non-empty
};

/// Candidate logical forms for one question, as read from a JSON-lines file:
/// {"id", "question", "table", "gold": [str], "candidates": [lf strings]}.
struct CandidateRecord {
  std::string id;
  std::string question;
  std::string table_ref;
  std::vector<std::string> gold_strings;
  std::vector<std::string> lf_texts;
};

/// TSV with a mandatory `id  utterance  context  targetValue` header.
/// Gold answers are joined by '|'.
std::vector<QAExample> load_examples(const std::string& path);

std::vector<CandidateRecord> load_candidates(const std::string& path);
void write_candidates(const std::string& path, const std::vector<CandidateRecord>& recs);

}  // namespace tableqa

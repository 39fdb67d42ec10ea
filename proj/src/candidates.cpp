#include "tableqa/candidates.hpp"

namespace tableqa::train {

std::vector<Candidate> build_candidates(const QAExample& ex,
                                        const std::vector<std::string>& lf_texts,
                                        const Table& table, bool use_paraphrase,
                                        const para::Lexicon& lex, BuildStats* stats) {
  std::vector<Candidate> out;
  out.reserve(lf_texts.size());
  for (size_t i = 0; i < lf_texts.size(); ++i) {
    Candidate c;
    c.lf_text = lf_texts[i];
    c.source_index = static_cast<int>(i);
    lf::LogicalForm z;
    try {
      z = lf::parse_lf(lf_texts[i]);
    } catch (const DataError&) {
      if (stats) ++stats->parse_failures;
      c.paraphrase_text = lf_texts[i];
      out.push_back(std::move(c));
      continue;
    }
    c.paraphrase_text = use_paraphrase ? para::paraphrase(z, lex) : lf::serialize(z);
    try {
      c.answer = exec::answer_of(z, table);
    } catch (const DataError&) {
      if (stats) ++stats->exec_failures;
      out.push_back(std::move(c));
      continue;
    }
    c.form = std::move(z);
    c.executable = true;
    c.label = values_match(c.answer, ex.gold) ? 1 : 0;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tableqa::train

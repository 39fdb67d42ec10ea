#include "tableqa/evaluator.hpp"

#include <algorithm>
#include <json.hpp>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tableqa::harness {

void Scorer::validate() const {
  if (members.empty()) throw DataError("no model loaded");
  for (const auto* m : members)
    if (!(m->params.cfg == members[0]->params.cfg))
      throw DataError("ensemble members have mismatched configurations");
}

std::vector<double> Scorer::score_texts(const std::string& question,
                                        const std::vector<std::string>& texts) const {
  validate();
  std::vector<double> out(texts.size(), 0.0);
  for (const auto* m : members)
    for (size_t i = 0; i < texts.size(); ++i)
      out[i] += nn::score_pair(question, texts[i], m->params, m->vocab, false, 0);
  for (double& s : out) s /= static_cast<double>(members.size());
  return out;
}

RankedList rank_question(const std::string& id, const std::string& question,
                         const std::vector<train::Candidate>& candidates,
                         const std::vector<CellValue>& gold, const Scorer& scorer) {
  RankedList rl;
  rl.id = id;
  const double ninf = -std::numeric_limits<double>::infinity();
  rl.scores.assign(candidates.size(), ninf);

  std::vector<int> usable;
  std::vector<std::string> texts;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    if (!candidates[i].executable) continue;
    usable.push_back(i);
    texts.push_back(candidates[i].paraphrase_text);
  }
  if (!usable.empty()) {
    std::vector<double> scored = scorer.score_texts(question, texts);
    for (size_t k = 0; k < usable.size(); ++k) rl.scores[usable[k]] = scored[k];
  }

  rl.order.resize(candidates.size());
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) rl.order[i] = i;
  std::sort(rl.order.begin(), rl.order.end(), [&rl, &candidates](int a, int b) {
    if (rl.scores[a] != rl.scores[b]) return rl.scores[a] > rl.scores[b];
    return candidates[a].source_index < candidates[b].source_index;
  });

  if (!rl.order.empty() && !usable.empty()) {
    rl.chosen = rl.order[0];
    rl.answer = candidates[rl.chosen].answer;
    rl.correct = !gold.empty() && candidates[rl.chosen].executable &&
                 candidates[rl.chosen].label == 1;
  }
  return rl;
}

const char* category_name(Category c) {
  switch (c) {
    case Category::Lookup: return "lookup";
    case Category::AggregationNextPrev: return "aggregation_next_prev";
    case Category::Superlatives: return "superlatives";
    case Category::ArithmeticComparisons: return "arithmetic_comparisons";
  }
  return "lookup";
}

Category classify_lf(const lf::Node& n) {
  if (lf::contains_kind(n, lf::Kind::Superlative)) return Category::Superlatives;
  if (lf::contains_kind(n, lf::Kind::Arithmetic) || lf::contains_kind(n, lf::Kind::Comparison))
    return Category::ArithmeticComparisons;
  if (lf::contains_kind(n, lf::Kind::Aggregation) || lf::contains_relation(n, lf::kNext))
    return Category::AggregationNextPrev;
  return Category::Lookup;
}

EvalReport evaluate(const std::vector<QAExample>& examples,
                    const std::vector<CandidateRecord>& records, const std::string& tables_dir,
                    const Scorer& scorer, bool use_paraphrase, const para::Lexicon& lex,
                    int threads) {
  scorer.validate();

  std::map<std::string, const CandidateRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::vector<std::string> missing, extra;
  for (const auto& ex : examples)
    if (!by_id.count(ex.id)) missing.push_back(ex.id);
  {
    std::map<std::string, bool> example_ids;
    for (const auto& ex : examples) example_ids[ex.id] = true;
    for (const auto& r : records)
      if (!example_ids.count(r.id)) extra.push_back(r.id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "example/candidate id mismatch;";
    if (!missing.empty()) {
      msg += " missing candidates for:";
      for (const auto& id : missing) msg += " " + id;
    }
    if (!extra.empty()) {
      msg += " unmatched candidate ids:";
      for (const auto& id : extra) msg += " " + id;
    }
    throw DataError(msg);
  }

  EvalReport report;
  report.n = static_cast<int>(examples.size());

  // sequential: table loading and candidate construction
  std::map<std::string, std::shared_ptr<const Table>> table_cache;
  std::vector<train::TrainExample> built(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    const QAExample& ex = examples[i];
    std::string path = tables_dir.empty() ? ex.table_ref : tables_dir + "/" + ex.table_ref;
    auto it = table_cache.find(path);
    if (it == table_cache.end()) {
      auto t = std::make_shared<Table>(load_table(path, format_for_path(path)));
      it = table_cache.emplace(path, std::move(t)).first;
    }
    train::BuildStats stats;
    built[i].ex = ex;
    built[i].table = it->second;
    built[i].candidates = train::build_candidates(ex, by_id[ex.id]->lf_texts, *it->second,
                                                  use_paraphrase, lex, &stats);
    report.dropped_parse += stats.parse_failures;
    report.dropped_exec += stats.exec_failures;
  }

  // parallel: model scoring per question
  report.per_question.resize(examples.size());
  const int n = static_cast<int>(examples.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
#endif
  for (int i = 0; i < n; ++i) {
    report.per_question[i] = rank_question(built[i].ex.id, built[i].ex.question,
                                           built[i].candidates, built[i].ex.gold, scorer);
  }

  // sequential aggregation
  int correct = 0, covered = 0;
  for (int i = 0; i < n; ++i) {
    const RankedList& rl = report.per_question[i];
    if (rl.correct) {
      ++correct;
      const train::Candidate& chosen = built[i].candidates[rl.chosen];
      ++report.category_correct[category_name(classify_lf(*chosen.form.root))];
    }
    for (const auto& c : built[i].candidates)
      if (c.executable && c.label == 1) {
        ++covered;
        break;
      }
  }
  report.p_at_1 = n ? static_cast<double>(correct) / n : 0.0;
  report.coverage = n ? static_cast<double>(covered) / n : 0.0;
  return report;
}

std::string report_to_json(const EvalReport& r, bool include_per_question) {
  nlohmann::json j;
  j["n"] = r.n;
  j["p_at_1"] = r.p_at_1;
  j["coverage"] = r.coverage;
  j["category_correct"] = r.category_correct;
  j["dropped_parse"] = r.dropped_parse;
  j["dropped_exec"] = r.dropped_exec;
  if (include_per_question) {
    nlohmann::json qs = nlohmann::json::array();
    for (const auto& rl : r.per_question) {
      nlohmann::json q;
      q["id"] = rl.id;
      q["chosen"] = rl.chosen;
      q["correct"] = rl.correct;
      std::vector<std::string> answer;
      for (const auto& v : rl.answer) answer.push_back(v.display());
      q["answer"] = answer;
      nlohmann::json scores = nlohmann::json::array();
      for (double s : rl.scores) {
        if (s == -std::numeric_limits<double>::infinity()) scores.push_back(nullptr);
        else scores.push_back(s);
      }
      q["scores"] = scores;
      qs.push_back(q);
    }
    j["questions"] = qs;
  }
  return j.dump(2);
}

}  // namespace tableqa::harness

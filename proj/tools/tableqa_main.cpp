#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "tableqa/candidate_gen.hpp"
#include "tableqa/candidates.hpp"
#include "tableqa/checkpoint.hpp"
#include "tableqa/dataset.hpp"
#include "tableqa/evaluator.hpp"
#include "tableqa/executor.hpp"
#include "tableqa/glove.hpp"
#include "tableqa/lf.hpp"
#include "tableqa/paraphrase.hpp"
#include "tableqa/table.hpp"
#include "tableqa/trainer.hpp"

using namespace tableqa;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = s.find(',', start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

struct TrainCliArgs {
  std::string examples, candidates, tables_dir, config, out;
  int64_t seed = -1;
  bool no_dropout = false, no_char_emb = false, no_glove = false, no_paraphrase = false;
};

// Joins examples with candidate records by id; both files must align.
std::vector<train::TrainExample> assemble(const std::vector<QAExample>& examples,
                                          const std::vector<CandidateRecord>& records,
                                          const std::string& tables_dir, bool use_paraphrase,
                                          const para::Lexicon& lex, train::BuildStats* stats) {
  std::map<std::string, const CandidateRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::string missing;
  for (const auto& ex : examples)
    if (!by_id.count(ex.id)) missing += " " + ex.id;
  if (!missing.empty()) throw DataError("examples without candidates:" + missing);

  std::map<std::string, std::shared_ptr<const Table>> cache;
  std::vector<train::TrainExample> out;
  for (const auto& ex : examples) {
    std::string path = tables_dir.empty() ? ex.table_ref : tables_dir + "/" + ex.table_ref;
    auto it = cache.find(path);
    if (it == cache.end())
      it = cache.emplace(path, std::make_shared<Table>(load_table(path, format_for_path(path))))
               .first;
    train::TrainExample te;
    te.ex = ex;
    te.table = it->second;
    te.candidates =
        train::build_candidates(ex, by_id[ex.id]->lf_texts, *it->second, use_paraphrase, lex, stats);
    out.push_back(std::move(te));
  }
  return out;
}

int run_train(const TrainCliArgs& args) {
  train::RunConfig rc = train::parse_run_config(args.config);
  if (args.seed >= 0) rc.train.seed = static_cast<uint64_t>(args.seed);
  if (args.no_dropout) rc.model.dropout_keep = 1.0;
  if (args.no_char_emb) rc.model.use_char_emb = false;
  const bool use_paraphrase = !args.no_paraphrase;

  auto examples = load_examples(args.examples);
  auto records = load_candidates(args.candidates);
  auto lex = para::Lexicon::defaults();
  train::BuildStats stats;
  auto all = assemble(examples, records, args.tables_dir, use_paraphrase, lex, &stats);
  if (stats.parse_failures || stats.exec_failures)
    std::cerr << "dropped candidates: " << stats.parse_failures << " parse failures, "
              << stats.exec_failures << " execution failures\n";

  // deterministic tail split, independent of the seed
  const int n_val = static_cast<int>(static_cast<double>(all.size()) * rc.val_fraction);
  std::vector<train::TrainExample> train_set(all.begin(), all.end() - n_val);
  std::vector<train::TrainExample> val_set(all.end() - n_val, all.end());

  std::vector<std::string> texts;
  for (const auto& te : all) {
    texts.push_back(te.ex.question);
    for (const auto& c : te.candidates) texts.push_back(c.paraphrase_text);
  }
  Vocab vocab = Vocab::build(texts);
  nn::ModelParams params = nn::init_params(rc.model, vocab, rc.train.seed);
  if (!rc.glove_path.empty() && !args.no_glove) {
    int hits = nn::load_word_vectors(rc.glove_path, vocab, params.word_emb);
    std::cerr << "word vectors: " << hits << " of " << vocab.word_count() << " rows initialized\n";
  }
  // threads > 1 fans batches out across pairs; kernels stay serial inside
  auto result = train::train_model(train_set, val_set, rc.train, vocab, std::move(params));
  nn::save_checkpoint(args.out, result.params, vocab);

  std::string log_path = args.out + ".log.jsonl";
  std::ofstream log(log_path, std::ios::binary);
  for (const auto& e : result.log) {
    nlohmann::json j;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["val_p_at_1"] = e.val_p1;
    j["train_p_at_1"] = e.train_p1;
    j["seconds"] = e.seconds;
    log << j.dump() << "\n";
  }
  std::cout << "checkpoint written to " << args.out << " (best epoch " << result.best_epoch
            << ", val P@1 " << result.best_val_p1 << "); log: " << log_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised question answering over tables"};
  app.require_subcommand(1);

  // parse-lf
  std::string lf_text;
  auto* cmd_parse = app.add_subcommand("parse-lf", "Parse a logical form, print the canonical form");
  cmd_parse->add_option("lf", lf_text, "logical form text")->required();

  // exec
  std::string exec_table, exec_lf;
  auto* cmd_exec = app.add_subcommand("exec", "Execute a logical form on a table");
  cmd_exec->add_option("--table", exec_table)->required();
  cmd_exec->add_option("--lf", exec_lf)->required();

  // paraphrase
  std::string para_lf, para_lexicon;
  auto* cmd_para = app.add_subcommand("paraphrase", "Paraphrase a logical form");
  cmd_para->add_option("--lf", para_lf)->required();
  cmd_para->add_option("--lexicon", para_lexicon);

  // gen-candidates
  std::string gen_table, gen_question;
  int gen_budget = 0;
  auto* cmd_gen = app.add_subcommand("gen-candidates", "Enumerate template candidates for a table");
  cmd_gen->add_option("--table", gen_table)->required();
  cmd_gen->add_option("--question", gen_question)->required();
  cmd_gen->add_option("--budget", gen_budget)->required();

  // train
  TrainCliArgs train_args;
  auto* cmd_train = app.add_subcommand("train", "Train a ranking model");
  cmd_train->add_option("--examples", train_args.examples)->required();
  cmd_train->add_option("--candidates", train_args.candidates)->required();
  cmd_train->add_option("--tables-dir", train_args.tables_dir)->required();
  cmd_train->add_option("--config", train_args.config)->required();
  cmd_train->add_option("--out", train_args.out)->required();
  cmd_train->add_option("--seed", train_args.seed);
  cmd_train->add_flag("--no-dropout", train_args.no_dropout);
  cmd_train->add_flag("--no-char-emb", train_args.no_char_emb);
  cmd_train->add_flag("--no-glove", train_args.no_glove);
  cmd_train->add_flag("--no-paraphrase", train_args.no_paraphrase);

  // eval
  std::string eval_examples, eval_candidates, eval_tables, eval_models;
  bool eval_no_paraphrase = false, eval_brief = false;
  int eval_threads = 1;
  auto* cmd_eval = app.add_subcommand("eval", "Evaluate checkpoints; comma list for an ensemble");
  cmd_eval->add_option("--examples", eval_examples)->required();
  cmd_eval->add_option("--candidates", eval_candidates)->required();
  cmd_eval->add_option("--tables-dir", eval_tables)->required();
  cmd_eval->add_option("--model", eval_models)->required();
  cmd_eval->add_flag("--no-paraphrase", eval_no_paraphrase);
  cmd_eval->add_flag("--brief", eval_brief, "omit the per-question section");
  cmd_eval->add_option("--threads", eval_threads);

  // rank
  std::string rank_model, rank_question_text, rank_table, rank_cands;
  bool rank_no_paraphrase = false;
  auto* cmd_rank = app.add_subcommand("rank", "Rank candidate logical forms for one question");
  cmd_rank->add_option("--model", rank_model)->required();
  cmd_rank->add_option("--question", rank_question_text)->required();
  cmd_rank->add_option("--table", rank_table)->required();
  cmd_rank->add_option("--candidates-inline", rank_cands)->required();
  cmd_rank->add_flag("--no-paraphrase", rank_no_paraphrase);

  try {
    app.parse(argc, argv);

    if (cmd_parse->parsed()) {
      std::cout << lf::serialize(lf::parse_lf(lf_text)) << "\n";
      return 0;
    }

    if (cmd_exec->parsed()) {
      Table t = load_table(exec_table, format_for_path(exec_table));
      auto answer = exec::answer_of(lf::parse_lf(exec_lf), t);
      for (const auto& v : answer) std::cout << v.display() << "\n";
      return 0;
    }

    if (cmd_para->parsed()) {
      auto lex = para_lexicon.empty() ? para::Lexicon::defaults() : para::Lexicon::load(para_lexicon);
      std::cout << para::paraphrase(lf::parse_lf(para_lf), lex) << "\n";
      return 0;
    }

    if (cmd_gen->parsed()) {
      Table t = load_table(gen_table, format_for_path(gen_table));
      for (const auto& s : harness::generate_candidates_minimal(gen_question, t, gen_budget))
        std::cout << s << "\n";
      return 0;
    }

    if (cmd_train->parsed()) return run_train(train_args);

    if (cmd_eval->parsed()) {
      std::vector<nn::LoadedModel> models;
      for (const auto& path : split_commas(eval_models))
        models.push_back(nn::load_checkpoint(path));
      harness::Scorer scorer;
      for (const auto& m : models) scorer.members.push_back(&m);
      auto examples = load_examples(eval_examples);
      auto records = load_candidates(eval_candidates);
      auto lex = para::Lexicon::defaults();
      auto report = harness::evaluate(examples, records, eval_tables, scorer, !eval_no_paraphrase,
                                      lex, eval_threads);
      std::cout << harness::report_to_json(report, !eval_brief) << "\n";
      return 0;
    }

    if (cmd_rank->parsed()) {
      auto lm = nn::load_checkpoint(rank_model);
      Table t = load_table(rank_table, format_for_path(rank_table));
      std::ifstream in(rank_cands);
      if (!in) throw DataError("cannot open candidates file: " + rank_cands);
      std::vector<std::string> lf_texts;
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lf_texts.push_back(line);
      }
      QAExample ex;
      ex.id = "inline";
      ex.question = rank_question_text;
      auto lex = para::Lexicon::defaults();
      auto cands = train::build_candidates(ex, lf_texts, t, !rank_no_paraphrase, lex, nullptr);
      harness::Scorer scorer{{&lm}};
      auto rl = harness::rank_question(ex.id, ex.question, cands, {}, scorer);
      for (size_t k = 0; k < rl.order.size(); ++k) {
        int i = rl.order[k];
        std::string answer;
        for (const auto& v : cands[i].answer) {
          if (!answer.empty()) answer += "|";
          answer += v.display();
        }
        char score[32];
        if (cands[i].executable) std::snprintf(score, sizeof score, "%.6f", rl.scores[i]);
        else std::snprintf(score, sizeof score, "-inf");
        std::cout << (k + 1) << "\t" << score << "\t" << cands[i].lf_text << "\t" << answer
                  << "\n";
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

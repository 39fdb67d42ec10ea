#include "tableqa/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tableqa::train {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

struct PairRef {
  int qp, cp;  // question / candidate index of the positive
  int qn, cn;  // and of the negative
};

std::vector<PairRef> sample_pairs(const std::vector<TrainExample>& train_set,
                                  const TrainConfig& tcfg, Rng& rng) {
  std::vector<PairRef> pairs;
  if (!tcfg.global_pairs) {
    for (int q = 0; q < static_cast<int>(train_set.size()); ++q) {
      std::vector<int> pos, neg;
      const auto& cands = train_set[q].candidates;
      for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        if (!cands[i].executable) continue;
        (cands[i].label ? pos : neg).push_back(i);
      }
      if (pos.empty() || neg.empty()) continue;
      const size_t total = pos.size() * neg.size();
      if (total <= static_cast<size_t>(tcfg.pairs_per_question)) {
        for (int p : pos)
          for (int n : neg) pairs.push_back({q, p, q, n});
      } else {
        for (int k = 0; k < tcfg.pairs_per_question; ++k)
          pairs.push_back({q, pos[rng.integer(pos.size())], q, neg[rng.integer(neg.size())]});
      }
    }
  } else {
    std::vector<std::pair<int, int>> pos, neg;
    for (int q = 0; q < static_cast<int>(train_set.size()); ++q) {
      const auto& cands = train_set[q].candidates;
      for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        if (!cands[i].executable) continue;
        (cands[i].label ? pos : neg).emplace_back(q, i);
      }
    }
    if (!pos.empty() && !neg.empty()) {
      size_t budget = std::min(pos.size() * neg.size(),
                               static_cast<size_t>(tcfg.pairs_per_question) * train_set.size());
      for (size_t k = 0; k < budget; ++k) {
        auto [qp, cp] = pos[rng.integer(pos.size())];
        auto [qn, cn] = neg[rng.integer(neg.size())];
        pairs.push_back({qp, cp, qn, cn});
      }
    }
  }
  rng.shuffle(pairs);
  return pairs;
}

double process_pair(const std::vector<TrainExample>& train_set, const PairRef& pr,
                    const nn::ModelParams& params, const Vocab& vocab, const TrainConfig& tcfg,
                    uint64_t pair_id, nn::ModelParams& gbuf) {
  const TrainExample& ep = train_set[pr.qp];
  const TrainExample& en = train_set[pr.qn];
  const Candidate& cp = ep.candidates[pr.cp];
  const Candidate& cn = en.candidates[pr.cn];
  nn::PairTrace tp, tn;
  double sp = nn::score_pair_traced(ep.ex.question, cp.paraphrase_text, params, vocab, true,
                                    mix_seed(tcfg.seed, pair_id, 0), tp);
  double sn = nn::score_pair_traced(en.ex.question, cn.paraphrase_text, params, vocab, true,
                                    mix_seed(tcfg.seed, pair_id, 1), tn);
  double viol = tcfg.margin - sp + sn;
  if (viol <= 0) return 0.0;
  nn::score_pair_backward(params, tp, -1.0, gbuf);
  nn::score_pair_backward(params, tn, +1.0, gbuf);
  return viol;
}

void zero_params(nn::ModelParams& p) {
  nn::for_each_param(p, [](const std::string&, double* d, size_t n) { std::fill(d, d + n, 0.0); });
}

void add_params(nn::ModelParams& dst, const nn::ModelParams& src) {
  std::vector<std::pair<double*, size_t>> d;
  std::vector<const double*> s;
  nn::for_each_param(dst, [&d](const std::string&, double* p, size_t n) { d.emplace_back(p, n); });
  nn::for_each_param(src, [&s](const std::string&, const double* p, size_t) { s.push_back(p); });
  for (size_t i = 0; i < d.size(); ++i)
    for (size_t k = 0; k < d[i].second; ++k) d[i].first[k] += s[i][k];
}

}  // namespace

double p_at_1(const std::vector<TrainExample>& set, const nn::ModelParams& params,
              const Vocab& vocab, int threads) {
  if (set.empty()) return 0.0;
  std::vector<char> correct(set.size(), 0);
  const int n = static_cast<int>(set.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
#endif
  for (int q = 0; q < n; ++q) {
    const auto& cands = set[q].candidates;
    int best = -1;
    double best_score = 0;
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
      if (!cands[i].executable) continue;
      double s = nn::score_pair(set[q].ex.question, cands[i].paraphrase_text, params, vocab,
                                false, 0);
      if (best < 0 || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    correct[q] = best >= 0 && cands[best].label == 1;
  }
  int hits = 0;
  for (char c : correct) hits += c;
  return static_cast<double>(hits) / static_cast<double>(set.size());
}

TrainResult train_model(const std::vector<TrainExample>& train_set,
                        const std::vector<TrainExample>& val_set, const TrainConfig& tcfg,
                        const Vocab& vocab, nn::ModelParams initial) {
  if (train_set.empty()) throw DataError("empty training set");
  {
    Rng probe(tcfg.seed);
    if (sample_pairs(train_set, tcfg, probe).empty())
      throw DataError("no trainable (positive, negative) candidate pairs");
  }

  nn::ModelParams params = std::move(initial);
  AdamState state = AdamState::for_params(params);
  nn::ModelParams grads = nn::zeros_like(params);
  const int threads = std::max(1, tcfg.threads);
  std::vector<nn::ModelParams> buffers;
  if (threads > 1)
    for (int i = 0; i < threads; ++i) buffers.push_back(nn::zeros_like(params));

  Rng rng(tcfg.seed);
  TrainResult result;
  result.best_val_p1 = -1.0;
  nn::ModelParams snapshot = params;
  int stall = 0;
  uint64_t pair_counter = 0;

  for (int epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<PairRef> pairs = sample_pairs(train_set, tcfg, rng);
    double epoch_loss = 0;

    for (size_t start = 0; start < pairs.size(); start += tcfg.batch_size) {
      const size_t end = std::min(pairs.size(), start + static_cast<size_t>(tcfg.batch_size));
      zero_params(grads);
      if (threads == 1) {
        for (size_t k = start; k < end; ++k)
          epoch_loss += process_pair(train_set, pairs[k], params, vocab, tcfg,
                                     pair_counter + k, grads);
      } else {
        for (auto& b : buffers) zero_params(b);
        std::vector<double> losses(threads, 0.0);
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
        {
          const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
          for (long k = static_cast<long>(start); k < static_cast<long>(end); ++k)
            losses[tid] += process_pair(train_set, pairs[k], params, vocab, tcfg,
                                        pair_counter + static_cast<size_t>(k), buffers[tid]);
        }
#else
        for (size_t k = start; k < end; ++k)
          losses[0] += process_pair(train_set, pairs[k], params, vocab, tcfg,
                                    pair_counter + k, buffers[0]);
#endif
        for (int t = 0; t < threads; ++t) {  // fixed-order reduction
          epoch_loss += losses[t];
          add_params(grads, buffers[t]);
        }
      }
      adam_step(params, grads, state, tcfg.adam);
    }
    pair_counter += pairs.size();

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = epoch_loss;
    log.train_p1 = p_at_1(train_set, params, vocab, threads);
    log.val_p1 = val_set.empty() ? log.train_p1 : p_at_1(val_set, params, vocab, threads);
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(log);

    if (log.val_p1 > result.best_val_p1) {
      result.best_val_p1 = log.val_p1;
      result.best_epoch = epoch;
      snapshot = params;
      stall = 0;
    } else {
      ++stall;
    }
    if (stall >= tcfg.patience) break;
  }

  result.params = std::move(snapshot);
  return result;
}

std::vector<double> ensemble_scores(
    const std::vector<std::pair<const nn::ModelParams*, const Vocab*>>& members,
    const std::string& question, const std::vector<std::string>& texts) {
  if (members.empty()) throw DataError("empty ensemble");
  for (const auto& [params, vocab] : members)
    if (!(params->cfg == members[0].first->cfg))
      throw DataError("ensemble members have mismatched configurations");
  std::vector<double> out(texts.size(), 0.0);
  for (const auto& [params, vocab] : members)
    for (size_t i = 0; i < texts.size(); ++i)
      out[i] += nn::score_pair(question, texts[i], *params, *vocab, false, 0);
  for (double& s : out) s /= static_cast<double>(members.size());
  return out;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  RunConfig rc;
  std::string line;
  int lineno = 0;
  auto parse_int_list = [](const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stoi(part));
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ": line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    try {
      if (key == "word_dim") rc.model.word_dim = std::stoi(val);
      else if (key == "char_dim") rc.model.char_dim = std::stoi(val);
      else if (key == "char_filters") rc.model.char_filters = std::stoi(val);
      else if (key == "sent_filters") rc.model.sent_filters = std::stoi(val);
      else if (key == "fc_hidden") rc.model.fc_hidden = std::stoi(val);
      else if (key == "char_widths") rc.model.char_widths = parse_int_list(val);
      else if (key == "sent_widths") rc.model.sent_widths = parse_int_list(val);
      else if (key == "dropout_keep") rc.model.dropout_keep = std::stod(val);
      else if (key == "mode") rc.model.mode = nn::parse_mode(val);
      else if (key == "use_char_emb") rc.model.use_char_emb = std::stoi(val) != 0;
      else if (key == "margin") rc.train.margin = std::stod(val);
      else if (key == "lr") rc.train.adam.lr = std::stod(val);
      else if (key == "beta1") rc.train.adam.beta1 = std::stod(val);
      else if (key == "beta2") rc.train.adam.beta2 = std::stod(val);
      else if (key == "eps") rc.train.adam.eps = std::stod(val);
      else if (key == "batch_size") rc.train.batch_size = std::stoi(val);
      else if (key == "max_epochs") rc.train.max_epochs = std::stoi(val);
      else if (key == "patience") rc.train.patience = std::stoi(val);
      else if (key == "pairs_per_question") rc.train.pairs_per_question = std::stoi(val);
      else if (key == "seed") rc.train.seed = std::stoull(val);
      else if (key == "threads") rc.train.threads = std::stoi(val);
      else if (key == "global_pairs") rc.train.global_pairs = std::stoi(val) != 0;
      else if (key == "val_fraction") rc.val_fraction = std::stod(val);
      else if (key == "glove_path") rc.glove_path = val;
      else throw DataError(path + ": line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  return rc;
}

}  // namespace tableqa::train

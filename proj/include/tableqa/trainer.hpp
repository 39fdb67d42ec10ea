#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tableqa/candidates.hpp"
#include "tableqa/model.hpp"
#include "tableqa/optimizer.hpp"

namespace tableqa::train {

struct TrainExample {
  QAExample ex;
  std::shared_ptr<const Table> table;
  std::vector<Candidate> candidates;
};

struct TrainConfig {
  double margin = 0.2;
  AdamConfig adam;
  // At lr 7e-4, Adam progress tracks the step count, so small batches train
  // much faster per epoch; validation P@1 can sit flat for a dozen epochs
  // before the first jump, hence the long patience.
  int batch_size = 16;
  int max_epochs = 50;
  int patience = 15;
  int pairs_per_question = 50;
  uint64_t seed = 42;
  int threads = 1;
  // pair positives and negatives across questions instead of within one
  bool global_pairs = false;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0;
  double train_p1 = 0;
  double val_p1 = 0;
  double seconds = 0;
};

struct TrainResult {
  nn::ModelParams params;  // best validation epoch
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_p1 = 0;
};

/// Mini-batch hinge training over (positive, negative) candidate pairs with
/// Adam and early stopping on validation P@1. Deterministic at fixed seed
/// and thread count.
TrainResult train_model(const std::vector<TrainExample>& train_set,
                        const std::vector<TrainExample>& val_set, const TrainConfig& tcfg,
                        const Vocab& vocab, nn::ModelParams initial);

/// Fraction of questions whose top-scored candidate is labeled positive.
/// Ties break to the lowest source index; questions without usable
/// candidates count as wrong.
double p_at_1(const std::vector<TrainExample>& set, const nn::ModelParams& params,
              const Vocab& vocab, int threads);

/// Per-candidate mean of member scores. Members must share one architecture.
std::vector<double> ensemble_scores(
    const std::vector<std::pair<const nn::ModelParams*, const Vocab*>>& members,
    const std::string& question, const std::vector<std::string>& texts);

// Model + training settings read from a key=value file.
struct RunConfig {
  nn::ModelConfig model;
  TrainConfig train;
  double val_fraction = 0.1;
  std::string glove_path;
};

RunConfig parse_run_config(const std::string& path);

}  // namespace tableqa::train

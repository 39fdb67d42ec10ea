#pragma once

// Gradient checking against central finite differences, plus small fixtures
// shared by the neural-net and training tests.

#include <cmath>
#include <string>
#include <vector>

#include "tableqa/model.hpp"
#include "tableqa/rng.hpp"
#include "tableqa/vocab.hpp"

namespace testing_support {

using namespace tableqa;

inline nn::ModelConfig tiny_config(nn::SimMode mode) {
  nn::ModelConfig cfg;
  cfg.word_dim = 8;
  cfg.char_dim = 4;
  cfg.char_filters = 3;
  cfg.char_widths = {1, 2, 3};
  cfg.sent_filters = 5;
  cfg.sent_widths = {2, 4, 6, 8};
  cfg.fc_hidden = 7;
  cfg.dropout_keep = 1.0;
  cfg.mode = mode;
  return cfg;
}

struct GradCheckReport {
  double worst_rel = 0;
  std::string worst_group;
  int checked = 0;
};

// Analytic gradients of score_pair vs central differences, sampling up to
// `per_group` coordinates of every parameter array.
inline GradCheckReport grad_check_score(const nn::ModelConfig& cfg, const std::string& question,
                                        const std::string& text, uint64_t seed, int per_group,
                                        bool training = false, double h = 1e-4) {
  Vocab vocab = Vocab::build({question, text});
  nn::ModelParams params = nn::init_params(cfg, vocab, seed);

  nn::PairTrace trace;
  nn::score_pair_traced(question, text, params, vocab, training, seed, trace);
  nn::ModelParams grads = nn::zeros_like(params);
  nn::score_pair_backward(params, trace, 1.0, grads);

  struct Slot {
    std::string name;
    double* data;
    size_t n;
  };
  std::vector<Slot> pslots, gslots;
  nn::for_each_param(params, [&pslots](const std::string& name, double* d, size_t n) {
    pslots.push_back({name, d, n});
  });
  nn::for_each_param(grads, [&gslots](const std::string& name, double* d, size_t n) {
    gslots.push_back({name, d, n});
  });

  GradCheckReport report;
  Rng pick(seed ^ 0xabcdef);
  for (size_t s = 0; s < pslots.size(); ++s) {
    const size_t n = pslots[s].n;
    std::vector<size_t> coords;
    if (static_cast<int>(n) <= per_group) {
      for (size_t i = 0; i < n; ++i) coords.push_back(i);
    } else {
      for (int k = 0; k < per_group; ++k) coords.push_back(pick.integer(n));
    }
    for (size_t i : coords) {
      const double keep = pslots[s].data[i];
      pslots[s].data[i] = keep + h;
      double up = nn::score_pair(question, text, params, vocab, training, seed);
      pslots[s].data[i] = keep - h;
      double dn = nn::score_pair(question, text, params, vocab, training, seed);
      pslots[s].data[i] = keep;
      const double numeric = (up - dn) / (2 * h);
      const double analytic = gslots[s].data[i];
      double rel;
      if (std::fabs(numeric) < 1e-10 && std::fabs(analytic) < 1e-10) rel = 0;
      else rel = std::fabs(numeric - analytic) / std::max(std::fabs(numeric), std::fabs(analytic));
      if (rel > report.worst_rel) {
        report.worst_rel = rel;
        report.worst_group = pslots[s].name;
      }
      ++report.checked;
    }
  }
  return report;
}

}  // namespace testing_support

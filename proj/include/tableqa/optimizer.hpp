#pragma once

#include <vector>

#include "tableqa/model.hpp"

namespace tableqa::train {

/// Ranking hinge: sum over all (p, n) pairs of max(0, theta - p + n).
double hinge_loss(const std::vector<double>& pos, const std::vector<double>& neg, double theta);

struct HingeGrads {
  double loss = 0;
  std::vector<double> d_pos, d_neg;  // subgradients per score
};
HingeGrads hinge_loss_grads(const std::vector<double>& pos, const std::vector<double>& neg,
                            double theta);

struct AdamConfig {
  double lr = 7e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  nn::ModelParams m, v;
  long long t = 0;

  static AdamState for_params(const nn::ModelParams& p) {
    AdamState st;
    st.m = nn::zeros_like(p);
    st.v = nn::zeros_like(p);
    return st;
  }
};

/// Bias-corrected elementwise update. A non-finite gradient aborts with a
/// NumericError naming the array.
void adam_step(nn::ModelParams& params, const nn::ModelParams& grads, AdamState& st,
               const AdamConfig& cfg);

}  // namespace tableqa::train

#include "tableqa/optimizer.hpp"

#include <cmath>

#include "tableqa/error.hpp"

namespace tableqa::train {

double hinge_loss(const std::vector<double>& pos, const std::vector<double>& neg, double theta) {
  double loss = 0;
  for (double p : pos)
    for (double n : neg) {
      double v = theta - p + n;
      if (v > 0) loss += v;
    }
  return loss;
}

HingeGrads hinge_loss_grads(const std::vector<double>& pos, const std::vector<double>& neg,
                            double theta) {
  HingeGrads out;
  out.d_pos.assign(pos.size(), 0.0);
  out.d_neg.assign(neg.size(), 0.0);
  for (size_t i = 0; i < pos.size(); ++i)
    for (size_t j = 0; j < neg.size(); ++j) {
      double v = theta - pos[i] + neg[j];
      if (v > 0) {
        out.loss += v;
        out.d_pos[i] -= 1.0;
        out.d_neg[j] += 1.0;
      }
    }
  return out;
}

void adam_step(nn::ModelParams& params, const nn::ModelParams& grads, AdamState& st,
               const AdamConfig& cfg) {
  struct Slot {
    std::string name;
    double* p;
    size_t n;
  };
  std::vector<Slot> param_slots, m_slots, v_slots;
  struct GradSlot {
    const double* p;
    size_t n;
  };
  std::vector<GradSlot> grad_slots;
  auto collect = [](nn::ModelParams& p, std::vector<Slot>& out) {
    nn::for_each_param(p, [&out](const std::string& name, double* data, size_t n) {
      out.push_back({name, data, n});
    });
  };
  collect(params, param_slots);
  collect(st.m, m_slots);
  collect(st.v, v_slots);
  nn::for_each_param(grads, [&grad_slots](const std::string&, const double* data, size_t n) {
    grad_slots.push_back({data, n});
  });
  if (grad_slots.size() != param_slots.size())
    throw DataError("gradient shape mismatch in adam_step");

  ++st.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  for (size_t s = 0; s < param_slots.size(); ++s) {
    if (param_slots[s].n != grad_slots[s].n)
      throw DataError("gradient shape mismatch for '" + param_slots[s].name + "'");
    double* p = param_slots[s].p;
    const double* g = grad_slots[s].p;
    double* m = m_slots[s].p;
    double* v = v_slots[s].p;
    for (size_t i = 0; i < param_slots[s].n; ++i) {
      if (!std::isfinite(g[i]))
        throw NumericError("non-finite gradient in '" + param_slots[s].name + "' at index " +
                           std::to_string(i));
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace tableqa::train

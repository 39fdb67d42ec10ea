#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tableqa/error.hpp"
#include "tableqa/rng.hpp"
#include "tableqa/tensor.hpp"
#include "tableqa/vocab.hpp"

namespace tableqa::nn {

enum class SimMode { DotProduct, Bilin, Fc, FcBilin };

SimMode parse_mode(const std::string& name);
std::string mode_name(SimMode m);

struct ModelConfig {
  int word_dim = 200;       // d
  int char_dim = 16;        // d_c
  int char_filters = 50;    // n_c per char width
  std::vector<int> char_widths = {1, 2, 3};
  int sent_filters = 100;   // n per sentence width
  std::vector<int> sent_widths = {2, 4, 6, 8};  // L
  int fc_hidden = 500;
  double dropout_keep = 0.8;
  SimMode mode = SimMode::FcBilin;
  bool use_char_emb = true;

  int token_dim() const {
    return word_dim + (use_char_emb ? static_cast<int>(char_widths.size()) * char_filters : 0);
  }
  int sent_dim() const { return sent_filters * static_cast<int>(sent_widths.size()); }
  int max_char_width() const;
  int max_sent_width() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ConvLayer {
  int width = 0;
  Tensor w;                  // filters x (width * input_dim)
  std::vector<double> bias;  // filters
};

/// Every trainable array. The two sentence encoders are separate parameter
/// sets; similarity-head arrays exist in all modes (unused heads just get
/// zero gradients).
struct ModelParams {
  ModelConfig cfg;
  Tensor word_emb;  // vocab words x d
  Tensor char_emb;  // vocab chars x d_c
  std::vector<ConvLayer> char_conv;
  std::vector<ConvLayer> q_enc;
  std::vector<ConvLayer> p_enc;
  Tensor S;  // d_s x d_s
  Tensor fc1_w;
  std::vector<double> fc1_b;
  Tensor fc2_w;  // 1 x fc_hidden
  std::vector<double> fc2_b;  // 1
  double alpha = 0.5;
};

ModelParams init_params(const ModelConfig& cfg, const Vocab& vocab, uint64_t seed);
ModelParams zeros_like(const ModelParams& p);

/// Ordered, named traversal of every trainable array.
using ParamVisitor = std::function<void(const std::string&, double*, size_t)>;
using ConstParamVisitor = std::function<void(const std::string&, const double*, size_t)>;
void for_each_param(ModelParams& p, const ParamVisitor& f);
void for_each_param(const ModelParams& p, const ConstParamVisitor& f);

// ---------------------------------------------------------------------------
// Forward traces kept for the backward pass.

struct CharTrace {
  std::vector<int> ids;  // padded char ids
  int real_len = 0;
  Tensor emb;                       // padded_len x d_c
  std::vector<Tensor> conv;         // per char width: n_c x P, post-ReLU
  std::vector<std::vector<int>> arg;  // pooled window per filter
  std::vector<int> valid;           // pooled window count per width
};

struct SentTrace {
  std::vector<int> word_ids;  // padded
  int real_tokens = 0;
  std::vector<CharTrace> chars;      // per padded token (empty without char emb)
  Tensor tok;                        // padded x token_dim
  std::vector<Tensor> conv;          // per sentence width: n x P (linear)
  std::vector<std::vector<int>> arg;
  std::vector<int> valid;
  std::vector<double> emb;  // sent_dim
};

struct SimTrace {
  double dot = 0, bil = 0, fc = 0;
  std::vector<double> x;  // [u; v]
  std::vector<double> h_pre, h_act, h_drop, mask;
  double o_pre = 0;
  double score = 0;
};

struct PairTrace {
  SentTrace q, p;
  SimTrace sim;
};

// ---------------------------------------------------------------------------
// Forward / backward.

/// Token rows for the given tokens plus PAD rows up to max(L).
Tensor embed_tokens(const std::vector<std::string>& tokens, const ModelParams& params,
                    const Vocab& vocab);

/// Convolve + max-over-time per width, concatenated in width order. Rows at
/// index >= real_rows are padding; windows made purely of padding are
/// excluded from pooling.
std::vector<double> embed_sentence(const Tensor& tok_mat, int real_rows,
                                   const std::vector<ConvLayer>& encoder);

/// Similarity head on two sentence embeddings. `rng` feeds the dropout mask
/// and is only drawn from when training with keep < 1 in an FC mode.
double similarity(std::span<const double> u, std::span<const double> v,
                  const ModelParams& params, bool training, Rng* rng, SimTrace* trace);

double score_pair(const std::string& question, const std::string& text,
                  const ModelParams& params, const Vocab& vocab, bool training, uint64_t seed);
double score_pair_traced(const std::string& question, const std::string& text,
                         const ModelParams& params, const Vocab& vocab, bool training,
                         uint64_t seed, PairTrace& trace);

/// Exact reverse-mode gradients for a recorded pair, accumulated into
/// `grads` (shaped like the parameters; see zeros_like).
void score_pair_backward(const ModelParams& params, const PairTrace& trace, double d_score,
                         ModelParams& grads);

}  // namespace tableqa::nn

#include "tableqa/model.hpp"

#include <algorithm>
#include <cmath>

#include "tableqa/kernels.hpp"

namespace tableqa::nn {

namespace {

double elu(double x) { return x > 0 ? x : std::expm1(x); }
double elu_grad(double pre) { return pre > 0 ? 1.0 : std::exp(pre); }

// Max over the first `valid` columns of each row; ties keep the lowest index.
void maxpool_rows(const Tensor& map, int valid, std::vector<double>& out,
                  std::vector<int>& arg, int out_offset) {
  for (int f = 0; f < map.rows; ++f) {
    const double* row = map.row_ptr(f);
    int best = 0;
    for (int p = 1; p < valid; ++p)
      if (row[p] > row[best]) best = p;
    out[out_offset + f] = row[best];
    arg[f] = best;
  }
}

}  // namespace

SimMode parse_mode(const std::string& name) {
  if (name == "dotproduct") return SimMode::DotProduct;
  if (name == "bilin") return SimMode::Bilin;
  if (name == "fc") return SimMode::Fc;
  if (name == "fc_bilin") return SimMode::FcBilin;
  throw DataError("unknown similarity mode '" + name + "'");
}

std::string mode_name(SimMode m) {
  switch (m) {
    case SimMode::DotProduct: return "dotproduct";
    case SimMode::Bilin: return "bilin";
    case SimMode::Fc: return "fc";
    case SimMode::FcBilin: return "fc_bilin";
  }
  return "fc_bilin";
}

int ModelConfig::max_char_width() const {
  return *std::max_element(char_widths.begin(), char_widths.end());
}

int ModelConfig::max_sent_width() const {
  return *std::max_element(sent_widths.begin(), sent_widths.end());
}

ModelParams init_params(const ModelConfig& cfg, const Vocab& vocab, uint64_t seed) {
  if (cfg.word_dim <= 0 || cfg.sent_filters <= 0 || cfg.sent_widths.empty())
    throw DataError("invalid model configuration");
  ModelParams p;
  p.cfg = cfg;
  p.word_emb = Tensor(vocab.word_count(), cfg.word_dim);
  if (cfg.use_char_emb) {
    p.char_emb = Tensor(vocab.char_count(), cfg.char_dim);
    for (int w : cfg.char_widths) {
      ConvLayer layer;
      layer.width = w;
      layer.w = Tensor(cfg.char_filters, w * cfg.char_dim);
      layer.bias.assign(cfg.char_filters, 0.0);
      p.char_conv.push_back(std::move(layer));
    }
  }
  const int dtok = cfg.token_dim();
  for (int l : cfg.sent_widths) {
    ConvLayer q, t;
    q.width = t.width = l;
    q.w = Tensor(cfg.sent_filters, l * dtok);
    t.w = Tensor(cfg.sent_filters, l * dtok);
    q.bias.assign(cfg.sent_filters, 0.0);
    t.bias.assign(cfg.sent_filters, 0.0);
    p.q_enc.push_back(std::move(q));
    p.p_enc.push_back(std::move(t));
  }
  const int ds = cfg.sent_dim();
  p.S = Tensor(ds, ds);
  p.fc1_w = Tensor(cfg.fc_hidden, 2 * ds);
  p.fc1_b.assign(cfg.fc_hidden, 0.0);
  p.fc2_w = Tensor(1, cfg.fc_hidden);
  p.fc2_b.assign(1, 0.0);

  Rng rng(seed);
  for_each_param(p, [&rng](const std::string&, double* data, size_t n) {
    for (size_t i = 0; i < n; ++i) data[i] = rng.uniform(-0.05, 0.05);
  });
  p.alpha = 0.5;
  return p;
}

ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  for_each_param(z, [](const std::string&, double* data, size_t n) {
    std::fill(data, data + n, 0.0);
  });
  z.alpha = 0.0;
  return z;
}

namespace {

template <typename Params, typename Fn>
void traverse(Params& p, const Fn& f) {
  f("word_emb", p.word_emb.v.data(), p.word_emb.v.size());
  if (p.cfg.use_char_emb) {
    f("char_emb", p.char_emb.v.data(), p.char_emb.v.size());
    for (auto& layer : p.char_conv) {
      std::string tag = std::to_string(layer.width);
      f("char_conv_w" + tag, layer.w.v.data(), layer.w.v.size());
      f("char_conv_b" + tag, layer.bias.data(), layer.bias.size());
    }
  }
  for (auto& layer : p.q_enc) {
    std::string tag = std::to_string(layer.width);
    f("q_enc_w" + tag, layer.w.v.data(), layer.w.v.size());
    f("q_enc_b" + tag, layer.bias.data(), layer.bias.size());
  }
  for (auto& layer : p.p_enc) {
    std::string tag = std::to_string(layer.width);
    f("p_enc_w" + tag, layer.w.v.data(), layer.w.v.size());
    f("p_enc_b" + tag, layer.bias.data(), layer.bias.size());
  }
  f("S", p.S.v.data(), p.S.v.size());
  f("fc1_w", p.fc1_w.v.data(), p.fc1_w.v.size());
  f("fc1_b", p.fc1_b.data(), p.fc1_b.size());
  f("fc2_w", p.fc2_w.v.data(), p.fc2_w.v.size());
  f("fc2_b", p.fc2_b.data(), p.fc2_b.size());
  f("alpha", &p.alpha, 1);
}

}  // namespace

void for_each_param(ModelParams& p, const ParamVisitor& f) { traverse(p, f); }

void for_each_param(const ModelParams& p, const ConstParamVisitor& f) {
  traverse(p, [&f](const std::string& name, const double* data, size_t n) { f(name, data, n); });
}

namespace {

void encode_token_chars(const ModelParams& params, const Vocab& vocab,
                        const std::string& token, CharTrace& tr,
                        std::vector<double>& features, int offset) {
  const ModelConfig& cfg = params.cfg;
  tr.ids.clear();
  for (unsigned char c : token) tr.ids.push_back(vocab.char_id(c));
  tr.real_len = static_cast<int>(tr.ids.size());
  const int len = std::max(tr.real_len, cfg.max_char_width());
  tr.ids.resize(len, Vocab::kPad);

  tr.emb = Tensor(len, cfg.char_dim);
  for (int i = 0; i < len; ++i) {
    const double* row = params.char_emb.row_ptr(tr.ids[i]);
    std::copy(row, row + cfg.char_dim, tr.emb.row_ptr(i));
  }

  tr.conv.resize(params.char_conv.size());
  tr.arg.resize(params.char_conv.size());
  tr.valid.resize(params.char_conv.size());
  for (size_t wi = 0; wi < params.char_conv.size(); ++wi) {
    const ConvLayer& layer = params.char_conv[wi];
    const int P = len - layer.width + 1;
    tr.conv[wi] = Tensor(cfg.char_filters, P);
    kernels::conv1d_forward(tr.emb.v.data(), len, cfg.char_dim, layer.w.v.data(),
                            layer.bias.data(), cfg.char_filters, layer.width,
                            tr.conv[wi].v.data());
    for (double& x : tr.conv[wi].v) x = x > 0 ? x : 0.0;  // ReLU
    // pool over windows that touch a real character; an all-pad token falls
    // back to every window
    tr.valid[wi] = tr.real_len > 0 ? std::min(P, tr.real_len) : P;
    tr.arg[wi].assign(cfg.char_filters, 0);
    maxpool_rows(tr.conv[wi], tr.valid[wi], features,
                 tr.arg[wi], offset + static_cast<int>(wi) * cfg.char_filters);
  }
}

void encode_sentence_trace(const ModelParams& params, const std::vector<ConvLayer>& enc,
                           const std::vector<std::string>& tokens, const Vocab& vocab,
                           SentTrace& tr) {
  const ModelConfig& cfg = params.cfg;
  tr.real_tokens = static_cast<int>(tokens.size());
  const int padded = std::max(tr.real_tokens, cfg.max_sent_width());
  tr.word_ids.assign(padded, Vocab::kPad);
  for (int t = 0; t < tr.real_tokens; ++t) tr.word_ids[t] = vocab.word_id(tokens[t]);

  const int dtok = cfg.token_dim();
  tr.tok = Tensor(padded, dtok);
  if (cfg.use_char_emb) tr.chars.resize(padded);
  std::vector<double> row(dtok, 0.0);
  for (int t = 0; t < padded; ++t) {
    const double* wrow = params.word_emb.row_ptr(tr.word_ids[t]);
    std::copy(wrow, wrow + cfg.word_dim, row.begin());
    if (cfg.use_char_emb) {
      const std::string& text = t < tr.real_tokens ? tokens[t] : std::string();
      encode_token_chars(params, vocab, text, tr.chars[t], row, cfg.word_dim);
    }
    std::copy(row.begin(), row.end(), tr.tok.row_ptr(t));
  }

  tr.conv.resize(enc.size());
  tr.arg.resize(enc.size());
  tr.valid.resize(enc.size());
  tr.emb.assign(cfg.sent_dim(), 0.0);
  int offset = 0;
  for (size_t wi = 0; wi < enc.size(); ++wi) {
    const ConvLayer& layer = enc[wi];
    const int P = padded - layer.width + 1;
    tr.conv[wi] = Tensor(cfg.sent_filters, P);
    kernels::conv1d_forward(tr.tok.v.data(), padded, dtok, layer.w.v.data(), layer.bias.data(),
                            cfg.sent_filters, layer.width, tr.conv[wi].v.data());
    tr.valid[wi] = tr.real_tokens > 0 ? std::min(P, tr.real_tokens) : P;
    tr.arg[wi].assign(cfg.sent_filters, 0);
    maxpool_rows(tr.conv[wi], tr.valid[wi], tr.emb, tr.arg[wi], offset);
    offset += cfg.sent_filters;
  }
}

void backward_sentence(const ModelParams& params, const std::vector<ConvLayer>& enc,
                       const SentTrace& tr, const std::vector<double>& d_emb,
                       std::vector<ConvLayer>& d_enc, ModelParams& grads) {
  const ModelConfig& cfg = params.cfg;
  const int padded = tr.tok.rows;
  const int dtok = cfg.token_dim();
  Tensor d_tok(padded, dtok);

  int offset = 0;
  for (size_t wi = 0; wi < enc.size(); ++wi) {
    const ConvLayer& layer = enc[wi];
    const int P = padded - layer.width + 1;
    Tensor d_conv(cfg.sent_filters, P);
    for (int f = 0; f < cfg.sent_filters; ++f)
      d_conv.at(f, tr.arg[wi][f]) += d_emb[offset + f];
    kernels::conv1d_backward_weights(tr.tok.v.data(), padded, dtok, cfg.sent_filters,
                                     layer.width, d_conv.v.data(), d_enc[wi].w.v.data(),
                                     d_enc[wi].bias.data());
    kernels::conv1d_backward_input(layer.w.v.data(), padded, dtok, cfg.sent_filters,
                                   layer.width, d_conv.v.data(), d_tok.v.data());
    offset += cfg.sent_filters;
  }

  for (int t = 0; t < padded; ++t) {
    const double* drow = d_tok.row_ptr(t);
    double* dwe = grads.word_emb.row_ptr(tr.word_ids[t]);
    for (int k = 0; k < cfg.word_dim; ++k) dwe[k] += drow[k];
    if (!cfg.use_char_emb) continue;

    const CharTrace& ct = tr.chars[t];
    const int len = ct.emb.rows;
    Tensor d_char_in(len, cfg.char_dim);
    for (size_t wi = 0; wi < params.char_conv.size(); ++wi) {
      const ConvLayer& layer = params.char_conv[wi];
      const int P = len - layer.width + 1;
      Tensor d_conv(cfg.char_filters, P);
      for (int f = 0; f < cfg.char_filters; ++f) {
        const int pos = ct.arg[wi][f];
        const double post = ct.conv[wi].at(f, pos);
        if (post > 0)  // ReLU gate
          d_conv.at(f, pos) += drow[cfg.word_dim + static_cast<int>(wi) * cfg.char_filters + f];
      }
      kernels::conv1d_backward_weights(ct.emb.v.data(), len, cfg.char_dim, cfg.char_filters,
                                       layer.width, d_conv.v.data(),
                                       grads.char_conv[wi].w.v.data(),
                                       grads.char_conv[wi].bias.data());
      kernels::conv1d_backward_input(layer.w.v.data(), len, cfg.char_dim, cfg.char_filters,
                                     layer.width, d_conv.v.data(), d_char_in.v.data());
    }
    for (int i = 0; i < len; ++i) {
      double* dce = grads.char_emb.row_ptr(ct.ids[i]);
      const double* src = d_char_in.row_ptr(i);
      for (int k = 0; k < cfg.char_dim; ++k) dce[k] += src[k];
    }
  }
}

void forward_fc(const ModelParams& params, SimTrace& tr, bool training, Rng* rng) {
  const ModelConfig& cfg = params.cfg;
  const int hid = cfg.fc_hidden;
  tr.h_pre.assign(hid, 0.0);
  kernels::matvec(params.fc1_w.v.data(), hid, static_cast<int>(tr.x.size()), tr.x.data(),
                  params.fc1_b.data(), tr.h_pre.data());
  tr.h_act.resize(hid);
  for (int i = 0; i < hid; ++i) tr.h_act[i] = elu(tr.h_pre[i]);
  bool drop = training && cfg.dropout_keep < 1.0;
  if (drop) {
    if (!rng) throw NumericError("dropout requires a seeded generator");
    tr.mask.resize(hid);
    for (int i = 0; i < hid; ++i)
      tr.mask[i] = rng->uniform() < cfg.dropout_keep ? 1.0 / cfg.dropout_keep : 0.0;
    tr.h_drop.resize(hid);
    for (int i = 0; i < hid; ++i) tr.h_drop[i] = tr.h_act[i] * tr.mask[i];
  } else {
    tr.mask.clear();
    tr.h_drop = tr.h_act;
  }
  tr.o_pre = params.fc2_b[0] + kernels::dot(params.fc2_w.v.data(), tr.h_drop.data(), hid);
  tr.fc = elu(tr.o_pre);
}

void backward_fc(const ModelParams& params, const SimTrace& tr, double g,
                 ModelParams& grads, std::vector<double>& d_x) {
  const int hid = params.cfg.fc_hidden;
  const double d_o_pre = g * elu_grad(tr.o_pre);
  std::vector<double> d_h(hid);
  for (int i = 0; i < hid; ++i) {
    grads.fc2_w.v[i] += d_o_pre * tr.h_drop[i];
    d_h[i] = params.fc2_w.v[i] * d_o_pre;
  }
  grads.fc2_b[0] += d_o_pre;
  if (!tr.mask.empty())
    for (int i = 0; i < hid; ++i) d_h[i] *= tr.mask[i];
  for (int i = 0; i < hid; ++i) d_h[i] *= elu_grad(tr.h_pre[i]);
  kernels::matvec_backward_params(tr.x.data(), d_h.data(), hid, static_cast<int>(tr.x.size()),
                                  grads.fc1_w.v.data(), grads.fc1_b.data());
  kernels::matvec_backward_input(params.fc1_w.v.data(), d_h.data(), hid,
                                 static_cast<int>(tr.x.size()), d_x.data());
}

}  // namespace

Tensor embed_tokens(const std::vector<std::string>& tokens, const ModelParams& params,
                    const Vocab& vocab) {
  SentTrace tr;
  encode_sentence_trace(params, params.q_enc, tokens, vocab, tr);
  return tr.tok;
}

std::vector<double> embed_sentence(const Tensor& tok_mat, int real_rows,
                                   const std::vector<ConvLayer>& encoder) {
  if (tok_mat.rows < 1) throw DataError("token matrix needs at least one row");
  std::vector<double> emb;
  int total = 0;
  for (const auto& layer : encoder) total += layer.w.rows;
  emb.assign(total, 0.0);
  int offset = 0;
  for (const auto& layer : encoder) {
    if (tok_mat.rows < layer.width)
      throw DataError("token matrix shorter than filter width");
    const int P = tok_mat.rows - layer.width + 1;
    Tensor map(layer.w.rows, P);
    kernels::conv1d_forward(tok_mat.v.data(), tok_mat.rows, tok_mat.cols, layer.w.v.data(),
                            layer.bias.data(), layer.w.rows, layer.width, map.v.data());
    int valid = real_rows > 0 ? std::min(P, real_rows) : P;
    std::vector<int> arg(layer.w.rows, 0);
    maxpool_rows(map, valid, emb, arg, offset);
    offset += layer.w.rows;
  }
  return emb;
}

double similarity(std::span<const double> u, std::span<const double> v,
                  const ModelParams& params, bool training, Rng* rng, SimTrace* trace) {
  const int ds = params.cfg.sent_dim();
  if (static_cast<int>(u.size()) != ds || static_cast<int>(v.size()) != ds)
    throw DataError("sentence embedding shape mismatch");
  SimTrace local;
  SimTrace& tr = trace ? *trace : local;
  tr.dot = kernels::dot(u.data(), v.data(), ds);
  switch (params.cfg.mode) {
    case SimMode::DotProduct:
      tr.score = tr.dot;
      return tr.score;
    case SimMode::Bilin:
      tr.bil = kernels::bilinear(params.S.v.data(), ds, u.data(), v.data());
      tr.score = tr.bil;
      return tr.score;
    case SimMode::Fc:
      tr.x.assign(u.begin(), u.end());
      tr.x.insert(tr.x.end(), v.begin(), v.end());
      forward_fc(params, tr, training, rng);
      tr.score = tr.fc;
      return tr.score;
    case SimMode::FcBilin:
      tr.bil = kernels::bilinear(params.S.v.data(), ds, u.data(), v.data());
      tr.x.assign(u.begin(), u.end());
      tr.x.insert(tr.x.end(), v.begin(), v.end());
      forward_fc(params, tr, training, rng);
      tr.score = params.alpha * tr.bil + (1.0 - params.alpha) * tr.fc;
      return tr.score;
  }
  throw DataError("unknown similarity mode");
}

double score_pair_traced(const std::string& question, const std::string& text,
                         const ModelParams& params, const Vocab& vocab, bool training,
                         uint64_t seed, PairTrace& trace) {
  encode_sentence_trace(params, params.q_enc, tokenize(question), vocab, trace.q);
  encode_sentence_trace(params, params.p_enc, tokenize(text), vocab, trace.p);
  Rng rng(seed);
  return similarity(trace.q.emb, trace.p.emb, params, training, &rng, &trace.sim);
}

double score_pair(const std::string& question, const std::string& text,
                  const ModelParams& params, const Vocab& vocab, bool training, uint64_t seed) {
  PairTrace trace;
  return score_pair_traced(question, text, params, vocab, training, seed, trace);
}

void score_pair_backward(const ModelParams& params, const PairTrace& trace, double d_score,
                         ModelParams& grads) {
  const int ds = params.cfg.sent_dim();
  std::vector<double> d_u(ds, 0.0), d_v(ds, 0.0);
  const SimTrace& sim = trace.sim;
  switch (params.cfg.mode) {
    case SimMode::DotProduct: {
      for (int i = 0; i < ds; ++i) {
        d_u[i] += d_score * trace.p.emb[i];
        d_v[i] += d_score * trace.q.emb[i];
      }
      break;
    }
    case SimMode::Bilin:
      kernels::bilinear_backward(params.S.v.data(), ds, trace.q.emb.data(), trace.p.emb.data(),
                                 d_score, grads.S.v.data(), d_u.data(), d_v.data());
      break;
    case SimMode::Fc: {
      std::vector<double> d_x(2 * ds, 0.0);
      backward_fc(params, sim, d_score, grads, d_x);
      for (int i = 0; i < ds; ++i) {
        d_u[i] += d_x[i];
        d_v[i] += d_x[ds + i];
      }
      break;
    }
    case SimMode::FcBilin: {
      grads.alpha += d_score * (sim.bil - sim.fc);
      kernels::bilinear_backward(params.S.v.data(), ds, trace.q.emb.data(), trace.p.emb.data(),
                                 d_score * params.alpha, grads.S.v.data(), d_u.data(),
                                 d_v.data());
      std::vector<double> d_x(2 * ds, 0.0);
      backward_fc(params, sim, d_score * (1.0 - params.alpha), grads, d_x);
      for (int i = 0; i < ds; ++i) {
        d_u[i] += d_x[i];
        d_v[i] += d_x[ds + i];
      }
      break;
    }
  }
  backward_sentence(params, params.q_enc, trace.q, d_u, grads.q_enc, grads);
  backward_sentence(params, params.p_enc, trace.p, d_v, grads.p_enc, grads);
}

}  // namespace tableqa::nn

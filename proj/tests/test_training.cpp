#include <doctest.h>

#include <cmath>

#include "nn_helpers.hpp"
#include "tableqa/candidates.hpp"
#include "tableqa/optimizer.hpp"
#include "tableqa/trainer.hpp"

using namespace tableqa;
using testing_support::tiny_config;

TEST_CASE("hinge loss: worked examples") {
  CHECK(train::hinge_loss({0.9}, {0.5}, 0.2) == doctest::Approx(0.0));
  CHECK(train::hinge_loss({0.5}, {0.5}, 0.2) == doctest::Approx(0.2));
  CHECK(train::hinge_loss({0.5}, {0.5, 0.6}, 0.2) == doctest::Approx(0.5));
  CHECK(train::hinge_loss({}, {0.5}, 0.2) == 0.0);
  CHECK(train::hinge_loss({0.5}, {}, 0.2) == 0.0);
}

TEST_CASE("hinge loss is zero exactly when every margin holds") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> pos(1 + rng.integer(4)), neg(1 + rng.integer(4));
    for (auto& x : pos) x = rng.uniform(-1, 1);
    for (auto& x : neg) x = rng.uniform(-1, 1);
    double theta = 0.2;
    double loss = train::hinge_loss(pos, neg, theta);
    bool all_satisfied = true;
    for (double p : pos)
      for (double n : neg) all_satisfied = all_satisfied && (p - n >= theta);
    CHECK((loss == 0.0) == all_satisfied);
    CHECK(loss >= 0.0);
  }
}

TEST_CASE("hinge subgradients match central differences away from kinks") {
  Rng rng(5);
  const double theta = 0.2, h = 1e-6;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pos(1 + rng.integer(3)), neg(1 + rng.integer(3));
    for (auto& x : pos) x = rng.uniform(-1, 1);
    for (auto& x : neg) x = rng.uniform(-1, 1);
    bool near_kink = false;
    for (double p : pos)
      for (double n : neg) near_kink = near_kink || std::fabs(theta - p + n) < 10 * h;
    if (near_kink) continue;

    auto g = train::hinge_loss_grads(pos, neg, theta);
    for (size_t i = 0; i < pos.size(); ++i) {
      auto up = pos, dn = pos;
      up[i] += h;
      dn[i] -= h;
      double fd = (train::hinge_loss(up, neg, theta) - train::hinge_loss(dn, neg, theta)) / (2 * h);
      CHECK(g.d_pos[i] == doctest::Approx(fd).epsilon(1e-6));
    }
    for (size_t j = 0; j < neg.size(); ++j) {
      auto up = neg, dn = neg;
      up[j] += h;
      dn[j] -= h;
      double fd = (train::hinge_loss(pos, up, theta) - train::hinge_loss(pos, dn, theta)) / (2 * h);
      CHECK(g.d_neg[j] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

namespace {

nn::ModelParams tiny_params(const Vocab& vocab, uint64_t seed) {
  return nn::init_params(tiny_config(nn::SimMode::FcBilin), vocab, seed);
}

}  // namespace

TEST_CASE("adam: first step moves a unit-gradient scalar by about -lr") {
  Vocab vocab = Vocab::build({"w"});
  nn::ModelParams params = tiny_params(vocab, 1);
  params.alpha = 0.0;
  nn::ModelParams grads = nn::zeros_like(params);
  grads.alpha = 1.0;
  auto st = train::AdamState::for_params(params);
  train::AdamConfig cfg;  // lr 7e-4
  train::adam_step(params, grads, st, cfg);
  CHECK(params.alpha == doctest::Approx(-7e-4).epsilon(1e-6));
  CHECK(st.t == 1);
}

TEST_CASE("adam: zero gradients leave parameters unchanged from a fresh state") {
  Vocab vocab = Vocab::build({"a b"});
  nn::ModelParams params = tiny_params(vocab, 2);
  nn::ModelParams copy = params;
  nn::ModelParams grads = nn::zeros_like(params);
  auto st = train::AdamState::for_params(params);
  train::adam_step(params, grads, st, {});
  bool same = true;
  nn::for_each_param(params, [&](const std::string& name, double* d, size_t n) {
    nn::for_each_param(copy, [&](const std::string& name2, double* d2, size_t n2) {
      if (name == name2 && n == n2)
        for (size_t i = 0; i < n; ++i) same = same && d[i] == d2[i];
    });
  });
  CHECK(same);
}

TEST_CASE("adam: identical runs are bit-identical") {
  Vocab vocab = Vocab::build({"a b c"});
  auto run = [&]() {
    nn::ModelParams params = tiny_params(vocab, 3);
    auto st = train::AdamState::for_params(params);
    Rng rng(9);
    for (int step = 0; step < 5; ++step) {
      nn::ModelParams grads = nn::zeros_like(params);
      nn::for_each_param(grads, [&rng](const std::string&, double* d, size_t n) {
        for (size_t i = 0; i < n; ++i) d[i] = rng.uniform(-1, 1);
      });
      train::adam_step(params, grads, st, {});
    }
    return params;
  };
  nn::ModelParams a = run();
  nn::ModelParams b = run();
  bool same = true;
  nn::for_each_param(a, [&](const std::string& name, double* d, size_t n) {
    nn::for_each_param(b, [&](const std::string& name2, double* d2, size_t n2) {
      if (name == name2 && n == n2)
        for (size_t i = 0; i < n; ++i) same = same && d[i] == d2[i];
    });
  });
  CHECK(same);
}

TEST_CASE("adam: non-finite gradients abort with diagnostics") {
  Vocab vocab = Vocab::build({"a"});
  nn::ModelParams params = tiny_params(vocab, 4);
  nn::ModelParams grads = nn::zeros_like(params);
  grads.alpha = std::numeric_limits<double>::quiet_NaN();
  auto st = train::AdamState::for_params(params);
  try {
    train::adam_step(params, grads, st, {});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("alpha") != std::string::npos);
  }
}

TEST_CASE("one adam step on a violated pair reduces its hinge contribution") {
  Vocab vocab = Vocab::build({"which act played", "act is rolling stones", "count all rows"});
  nn::ModelParams params = tiny_params(vocab, 6);
  const std::string q = "which act played";
  const std::string tp = "act is rolling stones";
  const std::string tn = "count all rows";

  double theta = 10.0;  // guarantee a violation
  nn::PairTrace trp, trn;
  double sp = nn::score_pair_traced(q, tp, params, vocab, false, 0, trp);
  double sn = nn::score_pair_traced(q, tn, params, vocab, false, 0, trn);
  double before = theta - sp + sn;
  REQUIRE(before > 0);

  nn::ModelParams grads = nn::zeros_like(params);
  nn::score_pair_backward(params, trp, -1.0, grads);
  nn::score_pair_backward(params, trn, +1.0, grads);

  // directional derivative along the negative gradient, checked numerically
  const double eps = 1e-6;
  nn::ModelParams probe = params;
  {
    std::vector<std::pair<double*, size_t>> ps;
    std::vector<const double*> gs;
    nn::for_each_param(probe, [&ps](const std::string&, double* d, size_t n) { ps.emplace_back(d, n); });
    nn::for_each_param(grads, [&gs](const std::string&, const double* d, size_t) { gs.push_back(d); });
    for (size_t s = 0; s < ps.size(); ++s)
      for (size_t i = 0; i < ps[s].second; ++i) ps[s].first[i] -= eps * gs[s][i];
  }
  double sp2 = nn::score_pair(q, tp, probe, vocab, false, 0);
  double sn2 = nn::score_pair(q, tn, probe, vocab, false, 0);
  double after_probe = theta - sp2 + sn2;
  CHECK(after_probe < before);  // loss strictly decreases along -grad

  // and a real adam step with a small learning rate helps too
  auto st = train::AdamState::for_params(params);
  train::AdamConfig acfg;
  acfg.lr = 1e-4;
  train::adam_step(params, grads, st, acfg);
  double sp3 = nn::score_pair(q, tp, params, vocab, false, 0);
  double sn3 = nn::score_pair(q, tn, params, vocab, false, 0);
  CHECK(theta - sp3 + sn3 < before);
  CHECK((sp3 > sp || sn3 < sn));
}

TEST_CASE("build_candidates labels by execution against gold") {
  Table t = parse_table(
      "act\tattendance\n"
      "Rolling Stones\t50000\n"
      "Beatles\t40000\n"
      "Rolling Stones\t60000\n",
      TableFormat::Tsv, "concerts");
  QAExample ex;
  ex.id = "q1";
  ex.question = "how many rolling stones concerts";
  ex.gold = {CellValue::number(2)};

  auto lex = para::Lexicon::defaults();
  train::BuildStats stats;
  auto cands = train::build_candidates(
      ex, {"count(Act.RollingStones)", "count(Act.Beatles)", "nonsense(((", "sum(act.beatles)"},
      t, true, lex, &stats);
  REQUIRE(cands.size() == 4);
  CHECK(cands[0].label == 1);
  CHECK(cands[1].label == 0);
  CHECK(cands[0].executable);
  CHECK(cands[1].executable);
  CHECK_FALSE(cands[2].executable);  // parse failure
  CHECK_FALSE(cands[3].executable);  // aggregation over rows fails
  CHECK(stats.parse_failures == 1);
  CHECK(stats.exec_failures == 1);
  CHECK(cands[0].paraphrase_text == "count act is rolling stones");
  CHECK(cands[0].source_index == 0);

  // label invariant: recompute independently
  for (const auto& c : cands) {
    if (!c.executable) continue;
    CHECK(c.label == (values_match(exec::answer_of(c.form, t), ex.gold) ? 1 : 0));
  }

  // the no-paraphrase ablation uses the canonical serialization
  auto raw = train::build_candidates(ex, {"count(Act.RollingStones)"}, t, false, lex, nullptr);
  CHECK(raw[0].paraphrase_text == "count(act.\"rolling stones\")");
  CHECK(raw[0].paraphrase_text == lf::serialize(raw[0].form));

  auto none = train::build_candidates(ex, {}, t, true, lex, nullptr);
  CHECK(none.empty());
}

TEST_CASE("ensemble_scores averages members and rejects config mismatches") {
  Vocab vocab = Vocab::build({"q", "one", "two"});
  nn::ModelParams a = tiny_params(vocab, 100);
  nn::ModelParams b = tiny_params(vocab, 200);
  std::vector<std::string> texts = {"one", "two"};

  auto solo = train::ensemble_scores({{&a, &vocab}}, "q", texts);
  for (size_t i = 0; i < texts.size(); ++i)
    CHECK(solo[i] == nn::score_pair("q", texts[i], a, vocab, false, 0));

  auto both = train::ensemble_scores({{&a, &vocab}, {&b, &vocab}}, "q", texts);
  for (size_t i = 0; i < texts.size(); ++i) {
    double ma = nn::score_pair("q", texts[i], a, vocab, false, 0);
    double mb = nn::score_pair("q", texts[i], b, vocab, false, 0);
    CHECK(both[i] == doctest::Approx((ma + mb) / 2));
  }
  CHECK(solo != both);  // different seeds learn different features

  nn::ModelParams c = nn::init_params(tiny_config(nn::SimMode::Fc), vocab, 1);
  CHECK_THROWS_AS(train::ensemble_scores({{&a, &vocab}, {&c, &vocab}}, "q", texts), DataError);
}

// Timing comparison of the serial reference kernels against their OpenMP
// twins, plus an end-to-end scoring comparison. Results must agree bit for
// bit; the table reports wall time and speedup.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tableqa/kernels.hpp"
#include "tableqa/model.hpp"
#include "tableqa/rng.hpp"
#include "tableqa/vocab.hpp"

using namespace tableqa;
namespace k = tableqa::nn::kernels;

namespace {

std::vector<double> randv(Rng& rng, size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

void report(const char* name, double serial_s, double par_s, bool identical) {
  std::printf("%-28s %10.3f ms %10.3f ms %7.2fx   %s\n", name, serial_s * 1e3, par_s * 1e3,
              serial_s / par_s, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; 'parallel' runs the serial code path\n");
#endif
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  Rng rng(17);
  const int reps = 5;

  {
    const int T = 64, D = 350, F = 100, width = 8, P = T - width + 1;
    auto in = randv(rng, static_cast<size_t>(T) * D);
    auto w = randv(rng, static_cast<size_t>(F) * width * D);
    auto bias = randv(rng, F);
    std::vector<double> out_s(static_cast<size_t>(F) * P), out_p(out_s.size());
    double ts = time_best_of(reps, [&] {
      for (int i = 0; i < 20; ++i)
        k::serial::conv1d_forward(in.data(), T, D, w.data(), bias.data(), F, width, out_s.data());
    });
    double tp = time_best_of(reps, [&] {
      for (int i = 0; i < 20; ++i)
        k::par::conv1d_forward(in.data(), T, D, w.data(), bias.data(), F, width, out_p.data());
    });
    report("conv1d forward (64x350)", ts, tp, out_s == out_p);

    auto d_out = randv(rng, out_s.size());
    std::vector<double> dw_s(w.size()), dw_p(w.size()), db_s(F), db_p(F);
    double bs = time_best_of(reps, [&] {
      std::fill(dw_s.begin(), dw_s.end(), 0.0);
      std::fill(db_s.begin(), db_s.end(), 0.0);
      for (int i = 0; i < 20; ++i)
        k::serial::conv1d_backward_weights(in.data(), T, D, F, width, d_out.data(), dw_s.data(),
                                           db_s.data());
    });
    double bp = time_best_of(reps, [&] {
      std::fill(dw_p.begin(), dw_p.end(), 0.0);
      std::fill(db_p.begin(), db_p.end(), 0.0);
      for (int i = 0; i < 20; ++i)
        k::par::conv1d_backward_weights(in.data(), T, D, F, width, d_out.data(), dw_p.data(),
                                        db_p.data());
    });
    report("conv1d backward weights", bs, bp, dw_s == dw_p && db_s == db_p);
  }

  {
    const int M = 500, N = 800;
    auto W = randv(rng, static_cast<size_t>(M) * N);
    auto x = randv(rng, N);
    auto b = randv(rng, M);
    std::vector<double> y_s(M), y_p(M);
    double ts = time_best_of(reps, [&] {
      for (int i = 0; i < 200; ++i) k::serial::matvec(W.data(), M, N, x.data(), b.data(), y_s.data());
    });
    double tp = time_best_of(reps, [&] {
      for (int i = 0; i < 200; ++i) k::par::matvec(W.data(), M, N, x.data(), b.data(), y_p.data());
    });
    report("matvec (500x800)", ts, tp, y_s == y_p);
  }

  {
    const int n = 400;
    auto S = randv(rng, static_cast<size_t>(n) * n);
    auto u = randv(rng, n);
    auto v = randv(rng, n);
    double r_s = 0, r_p = 0;
    double ts = time_best_of(reps, [&] {
      for (int i = 0; i < 200; ++i) r_s = k::serial::bilinear(S.data(), n, u.data(), v.data());
    });
    double tp = time_best_of(reps, [&] {
      for (int i = 0; i < 200; ++i) r_p = k::par::bilinear(S.data(), n, u.data(), v.data());
    });
    report("bilinear (400x400)", ts, tp, r_s == r_p);
  }

  {
    // end to end: one question scored against one paraphrase at full size
    nn::ModelConfig cfg;  // published dimensions
    Vocab vocab = Vocab::build(
        {"how many people attended the last rolling stones concert",
         "attendance as number of last table row where act is rolling stones"});
    nn::ModelParams params = nn::init_params(cfg, vocab, 99);
    const std::string q = "how many people attended the last rolling stones concert";
    const std::string t = "attendance as number of last table row where act is rolling stones";
    double s_s = 0, s_p = 0;
    bool before = k::parallel_enabled();
    k::set_parallel(false);
    double ts = time_best_of(3, [&] {
      for (int i = 0; i < 5; ++i) s_s = nn::score_pair(q, t, params, vocab, false, 0);
    });
    k::set_parallel(true);
    double tp = time_best_of(3, [&] {
      for (int i = 0; i < 5; ++i) s_p = nn::score_pair(q, t, params, vocab, false, 0);
    });
    k::set_parallel(before);
    report("score_pair (full model)", ts, tp, s_s == s_p);
  }

  return 0;
}

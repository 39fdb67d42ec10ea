#include <atomic>
#include <vector>

#include "tableqa/kernels.hpp"

// OpenMP twins of the serial kernels. The parallel loops split only over
// output elements; the per-element arithmetic matches the serial reference
// exactly, keeping results bit-identical at any thread count.

namespace tableqa::nn::kernels {

namespace par {

void conv1d_forward(const double* in, int T, int D, const double* w, const double* bias,
                    int F, int width, double* out) {
  const int P = T - width + 1;
  const int wlen = width * D;
#pragma omp parallel for schedule(static)
  for (int f = 0; f < F; ++f) {
    const double* wf = w + static_cast<size_t>(f) * wlen;
    for (int p = 0; p < P; ++p) {
      double acc = bias[f];
      const double* window = in + static_cast<size_t>(p) * D;
      for (int i = 0; i < wlen; ++i) acc += wf[i] * window[i];
      out[static_cast<size_t>(f) * P + p] = acc;
    }
  }
}

void conv1d_backward_weights(const double* in, int T, int D, int F, int width,
                             const double* d_out, double* d_w, double* d_bias) {
  const int P = T - width + 1;
  const int wlen = width * D;
#pragma omp parallel for schedule(static)
  for (int f = 0; f < F; ++f) {
    double* dwf = d_w + static_cast<size_t>(f) * wlen;
    double db = 0;
    for (int p = 0; p < P; ++p) {
      const double g = d_out[static_cast<size_t>(f) * P + p];
      db += g;
      const double* window = in + static_cast<size_t>(p) * D;
      for (int i = 0; i < wlen; ++i) dwf[i] += g * window[i];
    }
    d_bias[f] += db;
  }
}

void conv1d_backward_input(const double* w, int T, int D, int F, int width,
                           const double* d_out, double* d_in) {
  const int P = T - width + 1;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < T; ++t) {
    double* row = d_in + static_cast<size_t>(t) * D;
    for (int f = 0; f < F; ++f) {
      for (int off = 0; off < width; ++off) {
        const int p = t - off;
        if (p < 0 || p >= P) continue;
        const double g = d_out[static_cast<size_t>(f) * P + p];
        const double* wrow = w + (static_cast<size_t>(f) * width + off) * D;
        for (int k = 0; k < D; ++k) row[k] += g * wrow[k];
      }
    }
  }
}

void matvec(const double* W, int M, int N, const double* x, const double* bias, double* y) {
#pragma omp parallel for schedule(static)
  for (int m = 0; m < M; ++m) {
    double acc = bias ? bias[m] : 0.0;
    const double* row = W + static_cast<size_t>(m) * N;
    for (int n = 0; n < N; ++n) acc += row[n] * x[n];
    y[m] = acc;
  }
}

void matvec_backward_params(const double* x, const double* d_y, int M, int N,
                            double* d_W, double* d_b) {
#pragma omp parallel for schedule(static)
  for (int m = 0; m < M; ++m) {
    const double g = d_y[m];
    double* row = d_W + static_cast<size_t>(m) * N;
    for (int n = 0; n < N; ++n) row[n] += g * x[n];
    d_b[m] += g;
  }
}

void matvec_backward_input(const double* W, const double* d_y, int M, int N, double* d_x) {
#pragma omp parallel for schedule(static)
  for (int n = 0; n < N; ++n) {
    double acc = 0;
    for (int m = 0; m < M; ++m) acc += W[static_cast<size_t>(m) * N + n] * d_y[m];
    d_x[n] += acc;
  }
}

double bilinear(const double* S, int n, const double* u, const double* v) {
  std::vector<double> t(static_cast<size_t>(n));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* row = S + static_cast<size_t>(i) * n;
    double acc = 0;
    for (int j = 0; j < n; ++j) acc += row[j] * v[j];
    t[i] = acc;
  }
  // fixed-order final reduction
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += u[i] * t[i];
  return acc;
}

void bilinear_backward(const double* S, int n, const double* u, const double* v, double g,
                       double* d_S, double* d_u, double* d_v) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* row = S + static_cast<size_t>(i) * n;
    double* drow = d_S + static_cast<size_t>(i) * n;
    const double gu = g * u[i];
    double t = 0;
    for (int j = 0; j < n; ++j) {
      drow[j] += gu * v[j];
      t += row[j] * v[j];
    }
    d_u[i] += g * t;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += u[i] * S[static_cast<size_t>(i) * n + j];
    d_v[j] += g * acc;
  }
}

}  // namespace par

namespace {
std::atomic<bool> g_parallel{false};
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void conv1d_forward(const double* in, int T, int D, const double* w, const double* bias,
                    int F, int width, double* out) {
  if (parallel_enabled()) par::conv1d_forward(in, T, D, w, bias, F, width, out);
  else serial::conv1d_forward(in, T, D, w, bias, F, width, out);
}

void conv1d_backward_weights(const double* in, int T, int D, int F, int width,
                             const double* d_out, double* d_w, double* d_bias) {
  if (parallel_enabled()) par::conv1d_backward_weights(in, T, D, F, width, d_out, d_w, d_bias);
  else serial::conv1d_backward_weights(in, T, D, F, width, d_out, d_w, d_bias);
}

void conv1d_backward_input(const double* w, int T, int D, int F, int width,
                           const double* d_out, double* d_in) {
  if (parallel_enabled()) par::conv1d_backward_input(w, T, D, F, width, d_out, d_in);
  else serial::conv1d_backward_input(w, T, D, F, width, d_out, d_in);
}

void matvec(const double* W, int M, int N, const double* x, const double* bias, double* y) {
  if (parallel_enabled()) par::matvec(W, M, N, x, bias, y);
  else serial::matvec(W, M, N, x, bias, y);
}

void matvec_backward_params(const double* x, const double* d_y, int M, int N,
                            double* d_W, double* d_b) {
  if (parallel_enabled()) par::matvec_backward_params(x, d_y, M, N, d_W, d_b);
  else serial::matvec_backward_params(x, d_y, M, N, d_W, d_b);
}

void matvec_backward_input(const double* W, const double* d_y, int M, int N, double* d_x) {
  if (parallel_enabled()) par::matvec_backward_input(W, d_y, M, N, d_x);
  else serial::matvec_backward_input(W, d_y, M, N, d_x);
}

double bilinear(const double* S, int n, const double* u, const double* v) {
  return parallel_enabled() ? par::bilinear(S, n, u, v) : serial::bilinear(S, n, u, v);
}

void bilinear_backward(const double* S, int n, const double* u, const double* v, double g,
                       double* d_S, double* d_u, double* d_v) {
  if (parallel_enabled()) par::bilinear_backward(S, n, u, v, g, d_S, d_u, d_v);
  else serial::bilinear_backward(S, n, u, v, g, d_S, d_u, d_v);
}

}  // namespace tableqa::nn::kernels

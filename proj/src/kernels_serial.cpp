#include "tableqa/kernels.hpp"

namespace tableqa::nn::kernels {

namespace serial {

void conv1d_forward(const double* in, int T, int D, const double* w, const double* bias,
                    int F, int width, double* out) {
  const int P = T - width + 1;
  const int wlen = width * D;
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
  for (int m = 0; m < M; ++m) {
    double acc = bias ? bias[m] : 0.0;
    const double* row = W + static_cast<size_t>(m) * N;
    for (int n = 0; n < N; ++n) acc += row[n] * x[n];
    y[m] = acc;
  }
}

void matvec_backward_params(const double* x, const double* d_y, int M, int N,
                            double* d_W, double* d_b) {
  for (int m = 0; m < M; ++m) {
    const double g = d_y[m];
    double* row = d_W + static_cast<size_t>(m) * N;
    for (int n = 0; n < N; ++n) row[n] += g * x[n];
    d_b[m] += g;
  }
}

void matvec_backward_input(const double* W, const double* d_y, int M, int N, double* d_x) {
  for (int n = 0; n < N; ++n) {
    double acc = 0;
    for (int m = 0; m < M; ++m) acc += W[static_cast<size_t>(m) * N + n] * d_y[m];
    d_x[n] += acc;
  }
}

double bilinear(const double* S, int n, const double* u, const double* v) {
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const double* row = S + static_cast<size_t>(i) * n;
    double t = 0;
    for (int j = 0; j < n; ++j) t += row[j] * v[j];
    acc += u[i] * t;
  }
  return acc;
}

void bilinear_backward(const double* S, int n, const double* u, const double* v, double g,
                       double* d_S, double* d_u, double* d_v) {
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
  for (int j = 0; j < n; ++j) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += u[i] * S[static_cast<size_t>(i) * n + j];
    d_v[j] += g * acc;
  }
}

}  // namespace serial

double dot(const double* a, const double* b, int n) {
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace tableqa::nn::kernels

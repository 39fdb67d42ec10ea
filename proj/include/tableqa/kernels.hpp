#pragma once

#include <cstddef>

namespace tableqa::nn::kernels {

// Dense inner loops shared by the encoders and similarity heads. Every
// kernel exists twice: `serial` is the reference, `par` distributes the
// outer loop over OpenMP threads. Each output element is written by exactly
// one thread with the same inner summation order as the serial code, so the
// two variants produce bit-identical results for any thread count.
//
// Convolution layout: in is T x D row-major, weights are F x (width*D),
// out is F x P with P = T - width + 1. Backward kernels accumulate.

namespace serial {

void conv1d_forward(const double* in, int T, int D, const double* w, const double* bias,
                    int F, int width, double* out);
void conv1d_backward_weights(const double* in, int T, int D, int F, int width,
                             const double* d_out, double* d_w, double* d_bias);
void conv1d_backward_input(const double* w, int T, int D, int F, int width,
                           const double* d_out, double* d_in);
void matvec(const double* W, int M, int N, const double* x, const double* bias, double* y);
void matvec_backward_params(const double* x, const double* d_y, int M, int N,
                            double* d_W, double* d_b);
void matvec_backward_input(const double* W, const double* d_y, int M, int N, double* d_x);
double bilinear(const double* S, int n, const double* u, const double* v);
void bilinear_backward(const double* S, int n, const double* u, const double* v, double g,
                       double* d_S, double* d_u, double* d_v);

}  // namespace serial

namespace par {

void conv1d_forward(const double* in, int T, int D, const double* w, const double* bias,
                    int F, int width, double* out);
void conv1d_backward_weights(const double* in, int T, int D, int F, int width,
                             const double* d_out, double* d_w, double* d_bias);
void conv1d_backward_input(const double* w, int T, int D, int F, int width,
                           const double* d_out, double* d_in);
void matvec(const double* W, int M, int N, const double* x, const double* bias, double* y);
void matvec_backward_params(const double* x, const double* d_y, int M, int N,
                            double* d_W, double* d_b);
void matvec_backward_input(const double* W, const double* d_y, int M, int N, double* d_x);
double bilinear(const double* S, int n, const double* u, const double* v);
void bilinear_backward(const double* S, int n, const double* u, const double* v, double g,
                       double* d_S, double* d_u, double* d_v);

}  // namespace par

bool parallel_enabled();
void set_parallel(bool on);

// Dispatchers routing to serial or par per the global switch.
void conv1d_forward(const double* in, int T, int D, const double* w, const double* bias,
                    int F, int width, double* out);
void conv1d_backward_weights(const double* in, int T, int D, int F, int width,
                             const double* d_out, double* d_w, double* d_bias);
void conv1d_backward_input(const double* w, int T, int D, int F, int width,
                           const double* d_out, double* d_in);
void matvec(const double* W, int M, int N, const double* x, const double* bias, double* y);
void matvec_backward_params(const double* x, const double* d_y, int M, int N,
                            double* d_W, double* d_b);
void matvec_backward_input(const double* W, const double* d_y, int M, int N, double* d_x);
double bilinear(const double* S, int n, const double* u, const double* v);
void bilinear_backward(const double* S, int n, const double* u, const double* v, double g,
                       double* d_S, double* d_u, double* d_v);

double dot(const double* a, const double* b, int n);

}  // namespace tableqa::nn::kernels

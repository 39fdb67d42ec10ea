#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace tableqa::nn {

/// Row-major 2-D array of doubles. All model math runs in double; storage
/// files narrow to 32-bit floats.
struct Tensor {
  int rows = 0, cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

  double* row_ptr(int r) { return v.data() + static_cast<size_t>(r) * cols; }
  const double* row_ptr(int r) const { return v.data() + static_cast<size_t>(r) * cols; }
  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return v.size(); }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

}  // namespace tableqa::nn

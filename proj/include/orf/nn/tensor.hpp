#pragma once

#include <cassert>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace orf::nn {

struct NonFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroVector : std::runtime_error {
  ZeroVector() : std::runtime_error("cosine similarity of a zero vector") {}
};
struct SequenceTooLong : std::runtime_error {
  SequenceTooLong(size_t n, size_t max_len)
      : std::runtime_error("sequence of " + std::to_string(n) + " tokens exceeds max_len " +
                           std::to_string(max_len)) {}
};

// Row-major 2-D tensor of doubles (vectors are 1 x n).
struct Tensor {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  static Tensor zeros(size_t r, size_t c) { return Tensor(r, c); }

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

}  // namespace orf::nn

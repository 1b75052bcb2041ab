#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "na2q/errors.hpp"

namespace na2q {

// Dense row-major tensor of 64-bit floats. `grad` is empty until a backward
// pass materializes it; when present it always mirrors `shape`.
//
// The library only ever builds rank-1 and rank-2 tensors. A rank-1 tensor of
// length n behaves as a 1 x n matrix wherever a 2-D view is needed.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;
  std::vector<double> grad;

  Tensor() = default;

  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(element_count(shape), 0.0);
  }

  Tensor(std::vector<int> s, std::vector<double> values)
      : shape(std::move(s)), data(std::move(values)) {
    if (static_cast<int64_t>(data.size()) != element_count(shape)) {
      throw DimensionError("tensor data length does not match shape");
    }
  }

  static int64_t element_count(const std::vector<int>& s) {
    int64_t n = 1;
    for (int e : s) {
      if (e <= 0) throw DimensionError("tensor extents must be positive");
      n *= e;
    }
    return n;
  }

  static Tensor zeros(int r, int c) { return Tensor({r, c}); }

  static Tensor full(int r, int c, double v) {
    Tensor t({r, c});
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  static Tensor row(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return Tensor({1, n}, std::move(values));
  }

  static Tensor scalar(double v) { return Tensor({1, 1}, {v}); }

  int64_t size() const { return static_cast<int64_t>(data.size()); }

  // 2-D view: rank-1 is a single row.
  int rows() const { return shape.size() == 2 ? shape[0] : 1; }
  int cols() const { return shape.size() == 2 ? shape[1] : static_cast<int>(shape.empty() ? 0 : shape[0]); }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols() + c]; }

  double item() const {
    if (size() != 1) throw DimensionError("item() requires a single-element tensor");
    return data[0];
  }

  bool has_grad() const { return !grad.empty(); }

  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
  }

  void clear_grad() { grad.clear(); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

}  // namespace na2q

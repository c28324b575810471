// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "zeal/common.hpp"

namespace zeal {

// Dense row-major double tensor. Small and dependency-free; all network
// math in this project runs in double so finite-difference gradient checks
// are meaningful.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, double fill = 0.0) : shape(std::move(s)) {
    data.assign(numel(shape), fill);
  }

  static std::size_t numel(const std::vector<int>& s) {
    std::size_t n = 1;
    for (int d : s) {
      if (d < 0) throw ArgumentError("Tensor: negative dimension");
      n *= static_cast<std::size_t>(d);
    }
    return n;
  }

  std::size_t numel() const { return numel(shape); }
  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  // (C, H, W) indexing for feature maps.
  double& at3(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * shape[1] + y) * shape[2] + x];
  }
  double at3(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * shape[1] + y) * shape[2] + x];
  }

  // (T, D) indexing for sequences.
  double& at2(int t, int d) {
    return data[static_cast<std::size_t>(t) * shape[1] + d];
  }
  double at2(int t, int d) const {
    return data[static_cast<std::size_t>(t) * shape[1] + d];
  }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

}  // namespace zeal

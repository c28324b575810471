// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "zeal/rng.hpp"
#include "zeal/tensor.hpp"

namespace zeal::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  // Excluded from AdamW decoupled weight decay (biases, norm affine terms).
  bool no_decay = false;

  void init(std::string param_name, std::vector<int> shape, bool decay_exempt);
  void zero_grad() { grad.zero(); }
};

using ParamRefs = std::vector<Parameter*>;

// Error-free accumulation (Shewchuk partials with fsum-style final rounding):
// the result is the exact sum correctly rounded once, so it depends only on
// the multiset of addends, not their order. Used where bitwise
// order-invariance is required (temporal pooling).
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

double exact_mean(const double* values, size_t count);

// 2D convolution over (C,H,W) tensors with grouping (groups == channels
// gives the depthwise case). Weight layout (out_ch, in_ch/groups, k, k).
struct Conv2dCache {
  Tensor x;
};

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride,
         int pad, int groups, Rng& rng);

  Tensor forward(const Tensor& x, Conv2dCache* cache) const;
  // Accumulates into weight/bias grads; returns d(loss)/d(input).
  Tensor backward(const Conv2dCache& cache, const Tensor& dout);
  void params(ParamRefs& out);

  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }

  Parameter weight;
  Parameter bias;

 private:
  int in_ch_ = 0, out_ch_ = 0, kernel_ = 0, stride_ = 1, pad_ = 0, groups_ = 1;
};

// LayerNorm across the channel axis: the tensor is viewed as (C, P) with P
// the product of trailing dims, and each of the P positions is normalized
// over C. Covers both (C,H,W) maps and plain (D) vectors.
struct LayerNormCache {
  Tensor xhat;
  std::vector<double> inv_std;
};

class ChannelLayerNorm {
 public:
  ChannelLayerNorm() = default;
  ChannelLayerNorm(std::string name, int channels, double eps = 1e-6);

  Tensor forward(const Tensor& x, LayerNormCache* cache) const;
  Tensor backward(const LayerNormCache& cache, const Tensor& dout);
  void params(ParamRefs& out);

  Parameter gamma;
  Parameter beta;

 private:
  int channels_ = 0;
  double eps_ = 1e-6;
};

// Exact (erf-based) GELU.
struct GeluCache {
  Tensor x;
};
Tensor gelu(const Tensor& x, GeluCache* cache);
Tensor gelu_backward(const GeluCache& cache, const Tensor& dout);

// Dense layer on vectors: (in) -> (out), weight (out, in).
struct LinearCache {
  Tensor x;
};

class Linear {
 public:
  Linear() = default;
  Linear(std::string name, int in_dim, int out_dim, Rng& rng,
         double weight_std = 0.02);

  Tensor forward(const Tensor& x, LinearCache* cache) const;
  Tensor backward(const LinearCache& cache, const Tensor& dout);
  void params(ParamRefs& out);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }

  Parameter weight;
  Parameter bias;

 private:
  int in_dim_ = 0, out_dim_ = 0;
};

// Spatial global average pooling (C,H,W) -> (C).
Tensor global_avg_pool(const Tensor& x);
Tensor global_avg_pool_backward(const std::vector<int>& input_shape,
                                const Tensor& dout);

// Elementwise broadcast multiply of (C,H,W) by a (H,W) plane.
Tensor apply_plane(const Tensor& x, const Tensor& plane);
Tensor apply_plane_backward(const Tensor& plane, const Tensor& dout);

}  // namespace zeal::nn

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "zeal/nn/layers.hpp"

namespace zeal::nn {

// Global-norm gradient clipping; returns the pre-clip norm.
double clip_grad_norm(const ParamRefs& params, double max_norm);

void zero_grads(const ParamRefs& params);

// AdamW with decoupled weight decay; decay skips no_decay parameters.
class AdamW {
 public:
  AdamW() = default;
  explicit AdamW(double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8)
      : weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const ParamRefs& params, double lr);

 private:
  double weight_decay_ = 0.01;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long long t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace zeal::nn

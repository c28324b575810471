// SPDX-License-Identifier: Apache-2.0
#include "zeal/nn/optim.hpp"

#include <cmath>

#include "zeal/common.hpp"

namespace zeal::nn {

double clip_grad_norm(const ParamRefs& params, double max_norm) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    for (double g : p->grad.data) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (Parameter* p : params) {
      for (double& g : p->grad.data) g *= scale;
    }
  }
  return norm;
}

void zero_grads(const ParamRefs& params) {
  for (Parameter* p : params) p->zero_grad();
}

void AdamW::step(const ParamRefs& params, double lr) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i].shape = params[i]->value.shape;
      m_[i].data.assign(params[i]->value.data.size(), 0.0);
      v_[i] = m_[i];
    }
  }
  if (m_.size() != params.size()) {
    throw ArgumentError("optimizer bound to a different parameter set");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    for (size_t j = 0; j < p.value.data.size(); ++j) {
      const double g = p.grad.data[j];
      m_[i].data[j] = beta1_ * m_[i].data[j] + (1.0 - beta1_) * g;
      v_[i].data[j] = beta2_ * v_[i].data[j] + (1.0 - beta2_) * g * g;
      const double mhat = m_[i].data[j] / bc1;
      const double vhat = v_[i].data[j] / bc2;
      double update = mhat / (std::sqrt(vhat) + eps_);
      if (!p.no_decay) update += weight_decay_ * p.value.data[j];
      p.value.data[j] -= lr * update;
    }
  }
}

}  // namespace zeal::nn

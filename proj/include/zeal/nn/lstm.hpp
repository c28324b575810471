// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "zeal/nn/layers.hpp"

namespace zeal::nn {

// Single-direction LSTM scanned over a (T, input_dim) sequence, emitting the
// full (T, hidden) hidden-state trajectory. Gate rows are stacked [i f g o].
struct LstmCache {
  Tensor x;      // (T, d) as scanned
  Tensor gi, gf, gg, go;  // (T, h) post-activation gates
  Tensor c;      // (T, h) cell states
  Tensor tanhc;  // (T, h)
  Tensor h;      // (T, h) outputs
};

class Lstm {
 public:
  Lstm() = default;
  Lstm(const std::string& name, int input_dim, int hidden, Rng& rng);

  Tensor forward(const Tensor& seq, LstmCache* cache) const;
  // Accumulates parameter grads; returns d(loss)/d(seq).
  Tensor backward(const LstmCache& cache, const Tensor& dout);
  void params(ParamRefs& out);

  int hidden() const { return hidden_; }

 private:
  int input_dim_ = 0, hidden_ = 0;
  Parameter w_;  // (4h, d)
  Parameter u_;  // (4h, h)
  Parameter b_;  // (4h)
};

// Bidirectional wrapper: one forward-time and one reversed-time LSTM, hidden
// trajectories concatenated per original time index into (T, 2h).
struct BiLstmCache {
  LstmCache fwd;
  LstmCache bwd;
};

class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(const std::string& name, int input_dim, int hidden, Rng& rng);

  Tensor forward(const Tensor& seq, BiLstmCache* cache) const;
  Tensor backward(const BiLstmCache& cache, const Tensor& dout);
  void params(ParamRefs& out);

  int hidden() const { return fwd_.hidden(); }

 private:
  Lstm fwd_;
  Lstm bwd_;
};

Tensor reverse_time(const Tensor& seq);

}  // namespace zeal::nn

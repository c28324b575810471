// SPDX-License-Identifier: Apache-2.0
#include "zeal/nn/lstm.hpp"

#include <cmath>

#include "zeal/common.hpp"

namespace zeal::nn {

namespace {
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

Lstm::Lstm(const std::string& name, int input_dim, int hidden, Rng& rng)
    : input_dim_(input_dim), hidden_(hidden) {
  w_.init(name + ".w", {4 * hidden, input_dim}, false);
  u_.init(name + ".u", {4 * hidden, hidden}, false);
  b_.init(name + ".b", {4 * hidden}, true);
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : w_.value.data) v = rng.uniform(-k, k);
  for (double& v : u_.value.data) v = rng.uniform(-k, k);
}

Tensor Lstm::forward(const Tensor& seq, LstmCache* cache) const {
  if (seq.shape.size() != 2 || seq.shape[1] != input_dim_) {
    throw ArgumentError("lstm input must be (T, input_dim)");
  }
  const int t_len = seq.shape[0];
  const int h = hidden_;

  Tensor out;
  out.shape = {t_len, h};
  out.data.assign(out.numel(), 0.0);
  if (cache) {
    cache->x = seq;
    for (Tensor* t : {&cache->gi, &cache->gf, &cache->gg, &cache->go,
                      &cache->c, &cache->tanhc, &cache->h}) {
      t->shape = {t_len, h};
      t->data.assign(t->numel(), 0.0);
    }
  }

  std::vector<double> h_prev(static_cast<size_t>(h), 0.0);
  std::vector<double> c_prev(static_cast<size_t>(h), 0.0);
  std::vector<double> pre(static_cast<size_t>(4) * h, 0.0);
  for (int t = 0; t < t_len; ++t) {
    for (int r = 0; r < 4 * h; ++r) {
      double acc = b_.value.data[static_cast<size_t>(r)];
      const double* wr = &w_.value.data[static_cast<size_t>(r) * input_dim_];
      const double* xr = &seq.data[static_cast<size_t>(t) * input_dim_];
      for (int i = 0; i < input_dim_; ++i) acc += wr[i] * xr[i];
      const double* ur = &u_.value.data[static_cast<size_t>(r) * h];
      for (int i = 0; i < h; ++i) acc += ur[i] * h_prev[static_cast<size_t>(i)];
      pre[static_cast<size_t>(r)] = acc;
    }
    for (int i = 0; i < h; ++i) {
      const double gi = sigmoid(pre[static_cast<size_t>(i)]);
      const double gf = sigmoid(pre[static_cast<size_t>(h + i)]);
      const double gg = std::tanh(pre[static_cast<size_t>(2 * h + i)]);
      const double go = sigmoid(pre[static_cast<size_t>(3 * h + i)]);
      const double ct = gf * c_prev[static_cast<size_t>(i)] + gi * gg;
      const double tc = std::tanh(ct);
      const double ht = go * tc;
      out.at2(t, i) = ht;
      if (cache) {
        cache->gi.at2(t, i) = gi;
        cache->gf.at2(t, i) = gf;
        cache->gg.at2(t, i) = gg;
        cache->go.at2(t, i) = go;
        cache->c.at2(t, i) = ct;
        cache->tanhc.at2(t, i) = tc;
        cache->h.at2(t, i) = ht;
      }
      c_prev[static_cast<size_t>(i)] = ct;
      h_prev[static_cast<size_t>(i)] = ht;
    }
  }
  return out;
}

Tensor Lstm::backward(const LstmCache& cache, const Tensor& dout) {
  const int t_len = cache.x.shape[0];
  const int h = hidden_;

  Tensor dx;
  dx.shape = cache.x.shape;
  dx.data.assign(dx.numel(), 0.0);

  std::vector<double> dh_next(static_cast<size_t>(h), 0.0);
  std::vector<double> dc_next(static_cast<size_t>(h), 0.0);
  std::vector<double> dpre(static_cast<size_t>(4) * h, 0.0);
  for (int t = t_len - 1; t >= 0; --t) {
    for (int i = 0; i < h; ++i) {
      const double dh = dout.at2(t, i) + dh_next[static_cast<size_t>(i)];
      const double go = cache.go.at2(t, i);
      const double tc = cache.tanhc.at2(t, i);
      const double dc = dh * go * (1.0 - tc * tc) + dc_next[static_cast<size_t>(i)];
      const double gi = cache.gi.at2(t, i);
      const double gf = cache.gf.at2(t, i);
      const double gg = cache.gg.at2(t, i);
      const double c_prev = t > 0 ? cache.c.at2(t - 1, i) : 0.0;
      dpre[static_cast<size_t>(i)] = dc * gg * gi * (1.0 - gi);
      dpre[static_cast<size_t>(h + i)] = dc * c_prev * gf * (1.0 - gf);
      dpre[static_cast<size_t>(2 * h + i)] = dc * gi * (1.0 - gg * gg);
      dpre[static_cast<size_t>(3 * h + i)] = dh * tc * go * (1.0 - go);
      dc_next[static_cast<size_t>(i)] = dc * gf;
      dh_next[static_cast<size_t>(i)] = 0.0;
    }
    for (int r = 0; r < 4 * h; ++r) {
      const double g = dpre[static_cast<size_t>(r)];
      if (g == 0.0) continue;
      b_.grad.data[static_cast<size_t>(r)] += g;
      double* wg = &w_.grad.data[static_cast<size_t>(r) * input_dim_];
      const double* wr = &w_.value.data[static_cast<size_t>(r) * input_dim_];
      const double* xr = &cache.x.data[static_cast<size_t>(t) * input_dim_];
      double* dxr = &dx.data[static_cast<size_t>(t) * input_dim_];
      for (int i = 0; i < input_dim_; ++i) {
        wg[i] += g * xr[i];
        dxr[i] += g * wr[i];
      }
      double* ug = &u_.grad.data[static_cast<size_t>(r) * h];
      const double* ur = &u_.value.data[static_cast<size_t>(r) * h];
      for (int i = 0; i < h; ++i) {
        const double h_prev = t > 0 ? cache.h.at2(t - 1, i) : 0.0;
        ug[i] += g * h_prev;
        if (t > 0) dh_next[static_cast<size_t>(i)] += g * ur[i];
      }
    }
  }
  return dx;
}

void Lstm::params(ParamRefs& out) {
  out.push_back(&w_);
  out.push_back(&u_);
  out.push_back(&b_);
}

Tensor reverse_time(const Tensor& seq) {
  Tensor out;
  out.shape = seq.shape;
  out.data.resize(seq.data.size());
  const int t_len = seq.shape[0];
  const size_t d = seq.data.size() / static_cast<size_t>(t_len);
  for (int t = 0; t < t_len; ++t) {
    const double* src = &seq.data[static_cast<size_t>(t) * d];
    double* dst = &out.data[static_cast<size_t>(t_len - 1 - t) * d];
    for (size_t i = 0; i < d; ++i) dst[i] = src[i];
  }
  return out;
}

BiLstm::BiLstm(const std::string& name, int input_dim, int hidden, Rng& rng)
    : fwd_(name + ".fwd", input_dim, hidden, rng),
      bwd_(name + ".bwd", input_dim, hidden, rng) {}

Tensor BiLstm::forward(const Tensor& seq, BiLstmCache* cache) const {
  Tensor hf = fwd_.forward(seq, cache ? &cache->fwd : nullptr);
  Tensor hb = bwd_.forward(reverse_time(seq), cache ? &cache->bwd : nullptr);
  hb = reverse_time(hb);
  const int t_len = seq.shape[0];
  const int h = fwd_.hidden();
  Tensor out;
  out.shape = {t_len, 2 * h};
  out.data.resize(out.numel());
  for (int t = 0; t < t_len; ++t) {
    for (int i = 0; i < h; ++i) {
      out.at2(t, i) = hf.at2(t, i);
      out.at2(t, h + i) = hb.at2(t, i);
    }
  }
  return out;
}

Tensor BiLstm::backward(const BiLstmCache& cache, const Tensor& dout) {
  const int t_len = dout.shape[0];
  const int h = fwd_.hidden();
  Tensor df, db;
  df.shape = {t_len, h};
  db.shape = {t_len, h};
  df.data.resize(df.numel());
  db.data.resize(db.numel());
  for (int t = 0; t < t_len; ++t) {
    for (int i = 0; i < h; ++i) {
      df.at2(t, i) = dout.at2(t, i);
      db.at2(t, i) = dout.at2(t, h + i);
    }
  }
  Tensor dx = fwd_.backward(cache.fwd, df);
  Tensor dxb = bwd_.backward(cache.bwd, reverse_time(db));
  dxb = reverse_time(dxb);
  for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += dxb.data[i];
  return dx;
}

void BiLstm::params(ParamRefs& out) {
  fwd_.params(out);
  bwd_.params(out);
}

}  // namespace zeal::nn

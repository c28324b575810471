// SPDX-License-Identifier: Apache-2.0
#include "zeal/nn/layers.hpp"

#include <cmath>
#include <cstdlib>

#include "zeal/common.hpp"

namespace zeal::nn {

void Parameter::init(std::string param_name, std::vector<int> shape,
                     bool decay_exempt) {
  name = std::move(param_name);
  value.shape = shape;
  value.data.assign(value.numel(), 0.0);
  grad.shape = std::move(shape);
  grad.data.assign(grad.numel(), 0.0);
  no_decay = decay_exempt;
}

void ExactSum::add(double x) {
  size_t i = 0;
  for (size_t j = 0; j < partials_.size(); ++j) {
    double y = partials_[j];
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    double hi = x + y;
    double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::value() const {
  // fsum final rounding: partials are nonoverlapping, increasing in
  // magnitude; collapse from the top with a round-half-even correction.
  size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    double x = hi;
    double y = partials_[--n];
    hi = x + y;
    double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                (lo > 0.0 && partials_[n - 1] > 0.0))) {
    double y = lo * 2.0;
    double x = hi + y;
    double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

double exact_mean(const double* values, size_t count) {
  if (count == 0) throw ArgumentError("mean of empty range");
  ExactSum s;
  for (size_t i = 0; i < count; ++i) s.add(values[i]);
  return s.value() / static_cast<double>(count);
}

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride,
               int pad, int groups, Rng& rng)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_(kernel),
      stride_(stride),
      pad_(pad),
      groups_(groups) {
  if (in_ch % groups != 0 || out_ch % groups != 0) {
    throw ArgumentError("conv channels not divisible by groups");
  }
  weight.init(name + ".weight", {out_ch, in_ch / groups, kernel, kernel}, false);
  bias.init(name + ".bias", {out_ch}, true);
  for (double& w : weight.value.data) w = rng.normal(0.0, 0.02);
}

Tensor Conv2d::forward(const Tensor& x, Conv2dCache* cache) const {
  if (x.shape.size() != 3 || x.shape[0] != in_ch_) {
    throw ArgumentError("conv input shape mismatch");
  }
  const int h = x.shape[1], w = x.shape[2];
  const int oh = (h + 2 * pad_ - kernel_) / stride_ + 1;
  const int ow = (w + 2 * pad_ - kernel_) / stride_ + 1;
  if (oh <= 0 || ow <= 0) throw ArgumentError("conv output would be empty");
  const int icg = in_ch_ / groups_;
  const int ocg = out_ch_ / groups_;

  Tensor y;
  y.shape = {out_ch_, oh, ow};
  y.data.assign(y.numel(), 0.0);
  for (int oc = 0; oc < out_ch_; ++oc) {
    const int g = oc / ocg;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = bias.value.data[static_cast<size_t>(oc)];
        for (int icl = 0; icl < icg; ++icl) {
          const int ic = g * icg + icl;
          for (int ky = 0; ky < kernel_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kernel_; ++kx) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= w) continue;
              acc += weight.value.data[((static_cast<size_t>(oc) * icg + icl) *
                                            kernel_ +
                                        ky) *
                                           kernel_ +
                                       kx] *
                     x.at3(ic, iy, ix);
            }
          }
        }
        y.at3(oc, oy, ox) = acc;
      }
    }
  }
  if (cache) cache->x = x;
  return y;
}

Tensor Conv2d::backward(const Conv2dCache& cache, const Tensor& dout) {
  const Tensor& x = cache.x;
  const int h = x.shape[1], w = x.shape[2];
  const int oh = dout.shape[1], ow = dout.shape[2];
  const int icg = in_ch_ / groups_;
  const int ocg = out_ch_ / groups_;

  Tensor dx;
  dx.shape = x.shape;
  dx.data.assign(dx.numel(), 0.0);
  for (int oc = 0; oc < out_ch_; ++oc) {
    const int g = oc / ocg;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const double go = dout.at3(oc, oy, ox);
        if (go == 0.0) continue;
        bias.grad.data[static_cast<size_t>(oc)] += go;
        for (int icl = 0; icl < icg; ++icl) {
          const int ic = g * icg + icl;
          for (int ky = 0; ky < kernel_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kernel_; ++kx) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= w) continue;
              const size_t wi =
                  ((static_cast<size_t>(oc) * icg + icl) * kernel_ + ky) *
                      kernel_ +
                  kx;
              weight.grad.data[wi] += go * x.at3(ic, iy, ix);
              dx.at3(ic, iy, ix) += go * weight.value.data[wi];
            }
          }
        }
      }
    }
  }
  return dx;
}

void Conv2d::params(ParamRefs& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

ChannelLayerNorm::ChannelLayerNorm(std::string name, int channels, double eps)
    : channels_(channels), eps_(eps) {
  gamma.init(name + ".gamma", {channels}, true);
  beta.init(name + ".beta", {channels}, true);
  for (double& g : gamma.value.data) g = 1.0;
}

Tensor ChannelLayerNorm::forward(const Tensor& x, LayerNormCache* cache) const {
  if (x.shape.empty() || x.shape[0] != channels_) {
    throw ArgumentError("layernorm channel mismatch");
  }
  size_t positions = 1;
  for (size_t i = 1; i < x.shape.size(); ++i) {
    positions *= static_cast<size_t>(x.shape[i]);
  }
  const size_t c = static_cast<size_t>(channels_);

  Tensor y;
  y.shape = x.shape;
  y.data.assign(x.data.size(), 0.0);
  if (cache) {
    cache->xhat.shape = x.shape;
    cache->xhat.data.assign(x.data.size(), 0.0);
    cache->inv_std.assign(positions, 0.0);
  }
  for (size_t p = 0; p < positions; ++p) {
    double mean = 0.0;
    for (size_t ch = 0; ch < c; ++ch) mean += x.data[ch * positions + p];
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (size_t ch = 0; ch < c; ++ch) {
      const double d = x.data[ch * positions + p] - mean;
      var += d * d;
    }
    var /= static_cast<double>(c);
    const double inv = 1.0 / std::sqrt(var + eps_);
    for (size_t ch = 0; ch < c; ++ch) {
      const double xh = (x.data[ch * positions + p] - mean) * inv;
      if (cache) cache->xhat.data[ch * positions + p] = xh;
      y.data[ch * positions + p] =
          xh * gamma.value.data[ch] + beta.value.data[ch];
    }
    if (cache) cache->inv_std[p] = inv;
  }
  return y;
}

Tensor ChannelLayerNorm::backward(const LayerNormCache& cache,
                                  const Tensor& dout) {
  const size_t c = static_cast<size_t>(channels_);
  const size_t positions = cache.inv_std.size();

  Tensor dx;
  dx.shape = dout.shape;
  dx.data.assign(dout.data.size(), 0.0);
  for (size_t p = 0; p < positions; ++p) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (size_t ch = 0; ch < c; ++ch) {
      const double dy = dout.data[ch * positions + p] * gamma.value.data[ch];
      const double xh = cache.xhat.data[ch * positions + p];
      sum_dy += dy;
      sum_dy_xhat += dy * xh;
      gamma.grad.data[ch] += dout.data[ch * positions + p] * xh;
      beta.grad.data[ch] += dout.data[ch * positions + p];
    }
    const double inv_c = 1.0 / static_cast<double>(c);
    for (size_t ch = 0; ch < c; ++ch) {
      const double dy = dout.data[ch * positions + p] * gamma.value.data[ch];
      const double xh = cache.xhat.data[ch * positions + p];
      dx.data[ch * positions + p] =
          cache.inv_std[p] *
          (dy - sum_dy * inv_c - xh * sum_dy_xhat * inv_c);
    }
  }
  return dx;
}

void ChannelLayerNorm::params(ParamRefs& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

Tensor gelu(const Tensor& x, GeluCache* cache) {
  Tensor y;
  y.shape = x.shape;
  y.data.resize(x.data.size());
  for (size_t i = 0; i < x.data.size(); ++i) {
    const double v = x.data[i];
    y.data[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  }
  if (cache) cache->x = x;
  return y;
}

Tensor gelu_backward(const GeluCache& cache, const Tensor& dout) {
  Tensor dx;
  dx.shape = dout.shape;
  dx.data.resize(dout.data.size());
  for (size_t i = 0; i < dout.data.size(); ++i) {
    const double v = cache.x.data[i];
    const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
    dx.data[i] = dout.data[i] * (cdf + v * pdf);
  }
  return dx;
}

Linear::Linear(std::string name, int in_dim, int out_dim, Rng& rng,
               double weight_std)
    : in_dim_(in_dim), out_dim_(out_dim) {
  weight.init(name + ".weight", {out_dim, in_dim}, false);
  bias.init(name + ".bias", {out_dim}, true);
  for (double& w : weight.value.data) w = rng.normal(0.0, weight_std);
}

Tensor Linear::forward(const Tensor& x, LinearCache* cache) const {
  if (x.numel() != static_cast<size_t>(in_dim_)) {
    throw ArgumentError("linear input dim mismatch");
  }
  Tensor y;
  y.shape = {out_dim_};
  y.data.assign(static_cast<size_t>(out_dim_), 0.0);
  for (int o = 0; o < out_dim_; ++o) {
    double acc = bias.value.data[static_cast<size_t>(o)];
    const double* w = &weight.value.data[static_cast<size_t>(o) * in_dim_];
    for (int i = 0; i < in_dim_; ++i) acc += w[i] * x.data[static_cast<size_t>(i)];
    y.data[static_cast<size_t>(o)] = acc;
  }
  if (cache) cache->x = x;
  return y;
}

Tensor Linear::backward(const LinearCache& cache, const Tensor& dout) {
  Tensor dx;
  dx.shape = {in_dim_};
  dx.data.assign(static_cast<size_t>(in_dim_), 0.0);
  for (int o = 0; o < out_dim_; ++o) {
    const double go = dout.data[static_cast<size_t>(o)];
    bias.grad.data[static_cast<size_t>(o)] += go;
    double* wg = &weight.grad.data[static_cast<size_t>(o) * in_dim_];
    const double* w = &weight.value.data[static_cast<size_t>(o) * in_dim_];
    for (int i = 0; i < in_dim_; ++i) {
      wg[i] += go * cache.x.data[static_cast<size_t>(i)];
      dx.data[static_cast<size_t>(i)] += go * w[i];
    }
  }
  return dx;
}

void Linear::params(ParamRefs& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Tensor global_avg_pool(const Tensor& x) {
  if (x.shape.size() != 3) throw ArgumentError("pool expects (C,H,W)");
  const int c = x.shape[0];
  const size_t hw = static_cast<size_t>(x.shape[1]) * x.shape[2];
  Tensor y;
  y.shape = {c};
  y.data.assign(static_cast<size_t>(c), 0.0);
  for (int ch = 0; ch < c; ++ch) {
    double acc = 0.0;
    const double* base = &x.data[static_cast<size_t>(ch) * hw];
    for (size_t i = 0; i < hw; ++i) acc += base[i];
    y.data[static_cast<size_t>(ch)] = acc / static_cast<double>(hw);
  }
  return y;
}

Tensor global_avg_pool_backward(const std::vector<int>& input_shape,
                                const Tensor& dout) {
  const int c = input_shape[0];
  const size_t hw = static_cast<size_t>(input_shape[1]) * input_shape[2];
  Tensor dx;
  dx.shape = input_shape;
  dx.data.assign(static_cast<size_t>(c) * hw, 0.0);
  for (int ch = 0; ch < c; ++ch) {
    const double g = dout.data[static_cast<size_t>(ch)] / static_cast<double>(hw);
    double* base = &dx.data[static_cast<size_t>(ch) * hw];
    for (size_t i = 0; i < hw; ++i) base[i] = g;
  }
  return dx;
}

Tensor apply_plane(const Tensor& x, const Tensor& plane) {
  if (x.shape.size() != 3 || plane.shape.size() != 2 ||
      plane.shape[0] != x.shape[1] || plane.shape[1] != x.shape[2]) {
    throw ArgumentError("plane multiply shape mismatch");
  }
  const size_t hw = plane.data.size();
  Tensor y;
  y.shape = x.shape;
  y.data.resize(x.data.size());
  for (int c = 0; c < x.shape[0]; ++c) {
    const double* src = &x.data[static_cast<size_t>(c) * hw];
    double* dst = &y.data[static_cast<size_t>(c) * hw];
    for (size_t i = 0; i < hw; ++i) {
      // Canonical +0.0 at masked positions so perturbations under a zero
      // mask cannot leak through signed-zero bit patterns.
      dst[i] = plane.data[i] == 0.0 ? 0.0 : src[i] * plane.data[i];
    }
  }
  return y;
}

Tensor apply_plane_backward(const Tensor& plane, const Tensor& dout) {
  const size_t hw = plane.data.size();
  Tensor dx;
  dx.shape = dout.shape;
  dx.data.resize(dout.data.size());
  for (int c = 0; c < dout.shape[0]; ++c) {
    const double* src = &dout.data[static_cast<size_t>(c) * hw];
    double* dst = &dx.data[static_cast<size_t>(c) * hw];
    for (size_t i = 0; i < hw; ++i) {
      dst[i] = plane.data[i] == 0.0 ? 0.0 : src[i] * plane.data[i];
    }
  }
  return dx;
}

}  // namespace zeal::nn

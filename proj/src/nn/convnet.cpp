// SPDX-License-Identifier: Apache-2.0
#include "zeal/nn/convnet.hpp"

#include <cstring>

#include "zeal/common.hpp"

namespace zeal {

int ConvNetConfig::total_downsample() const {
  int t = stem_stride;
  for (int s : down_strides) t *= s;
  return t;
}

ConvNetConfig ConvNetConfig::micro() {
  ConvNetConfig c;
  c.preset = "micro";
  c.stem_kernel = 8;
  c.stem_stride = 8;
  c.depths = {1, 1};
  c.dims = {8, 16};
  c.down_strides = {4};
  return c;
}

ConvNetConfig ConvNetConfig::nano() {
  ConvNetConfig c;
  c.preset = "nano";
  return c;
}

ConvNetConfig ConvNetConfig::from_preset(const std::string& name) {
  if (name == "micro") return micro();
  if (name == "nano") return nano();
  throw ArgumentError("unknown net preset '" + name + "' (expected micro|nano)");
}

ConvNeXtBlock::ConvNeXtBlock(const std::string& name, int dim, Rng& rng)
    : dwconv_(name + ".dwconv", dim, dim, 7, 1, 3, dim, rng),
      norm_(name + ".norm", dim),
      pw1_(name + ".pw1", dim, 4 * dim, 1, 1, 0, 1, rng),
      pw2_(name + ".pw2", 4 * dim, dim, 1, 1, 0, 1, rng) {}

Tensor ConvNeXtBlock::forward(const Tensor& x, BlockCache* cache) const {
  Tensor h = dwconv_.forward(x, cache ? &cache->dw : nullptr);
  h = norm_.forward(h, cache ? &cache->ln : nullptr);
  h = pw1_.forward(h, cache ? &cache->pw1 : nullptr);
  h = nn::gelu(h, cache ? &cache->act : nullptr);
  h = pw2_.forward(h, cache ? &cache->pw2 : nullptr);
  for (size_t i = 0; i < h.data.size(); ++i) h.data[i] += x.data[i];
  return h;
}

Tensor ConvNeXtBlock::backward(const BlockCache& cache, const Tensor& dout) {
  Tensor d = pw2_.backward(cache.pw2, dout);
  d = nn::gelu_backward(cache.act, d);
  d = pw1_.backward(cache.pw1, d);
  d = norm_.backward(cache.ln, d);
  d = dwconv_.backward(cache.dw, d);
  for (size_t i = 0; i < d.data.size(); ++i) d.data[i] += dout.data[i];
  return d;
}

void ConvNeXtBlock::params(nn::ParamRefs& out) {
  dwconv_.params(out);
  norm_.params(out);
  pw1_.params(out);
  pw2_.params(out);
}

MaskedConvNet::MaskedConvNet(const ConvNetConfig& cfg, uint64_t seed)
    : cfg_(cfg) {
  if (cfg_.depths.size() != cfg_.dims.size() ||
      cfg_.down_strides.size() + 1 != cfg_.dims.size()) {
    throw ArgumentError("inconsistent stage configuration");
  }
  Rng rng = Rng(seed).fork("convnet");
  stem_ = nn::Conv2d("stem.conv", cfg_.in_channels, cfg_.dims[0],
                     cfg_.stem_kernel, cfg_.stem_stride, 0, 1, rng);
  stem_norm_ = nn::ChannelLayerNorm("stem.norm", cfg_.dims[0]);
  stages_.resize(cfg_.dims.size());
  for (size_t s = 0; s < cfg_.dims.size(); ++s) {
    if (s > 0) {
      const std::string dn = "down" + std::to_string(s);
      down_norms_.emplace_back(dn + ".norm", cfg_.dims[s - 1]);
      const int k = cfg_.down_strides[s - 1];
      down_convs_.emplace_back(dn + ".conv", cfg_.dims[s - 1], cfg_.dims[s], k,
                               k, 0, 1, rng);
    }
    for (int b = 0; b < cfg_.depths[s]; ++b) {
      stages_[s].emplace_back(
          "stage" + std::to_string(s) + ".block" + std::to_string(b),
          cfg_.dims[s], rng);
    }
  }
  final_norm_ = nn::ChannelLayerNorm("head.norm", cfg_.dims.back());
  null_embedding_.init("head.null_embedding", {cfg_.dims.back()}, true);
  for (double& v : null_embedding_.value.data) v = rng.normal(0.0, 0.02);
}

Tensor resample_grid_nearest(const PatchGrid& grid, int h, int w) {
  Tensor plane;
  plane.shape = {h, w};
  plane.data.resize(static_cast<size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    int sy = static_cast<int>((static_cast<int64_t>(y) * grid.rows) / h);
    if (sy >= grid.rows) sy = grid.rows - 1;
    for (int x = 0; x < w; ++x) {
      int sx = static_cast<int>((static_cast<int64_t>(x) * grid.cols) / w);
      if (sx >= grid.cols) sx = grid.cols - 1;
      plane.data[static_cast<size_t>(y) * w + x] = grid.at(sy, sx);
    }
  }
  return plane;
}

Tensor MaskedConvNet::forward(const Tensor& frame, const PatchGrid& grid,
                              NetCache* cache) const {
  if (frame.shape.size() != 3 || frame.shape[0] != cfg_.in_channels) {
    throw ArgumentError("frame tensor must be (channels, h, w)");
  }
  const int h = frame.shape[1], w = frame.shape[2];
  if (grid.src_height != h || grid.src_width != w) {
    throw ArgumentError("patch grid geometry does not match the frame");
  }
  const int down = cfg_.total_downsample();
  if (h % down != 0 || w % down != 0) {
    throw ArgumentError("frame dims must be divisible by the network stride " +
                        std::to_string(down));
  }

  Tensor input_mask = resample_grid_nearest(grid, h, w);
  Tensor x = nn::apply_plane(frame, input_mask);
  if (cache) cache->input_mask = input_mask;

  x = stem_.forward(x, cache ? &cache->stem : nullptr);
  x = stem_norm_.forward(x, cache ? &cache->stem_norm : nullptr);

  if (cache) {
    cache->down_norms.resize(down_convs_.size());
    cache->down_convs.resize(down_convs_.size());
    cache->stage_masks.clear();
    cache->blocks.assign(stages_.size(), {});
  }
  for (size_t s = 0; s < stages_.size(); ++s) {
    if (s > 0) {
      x = down_norms_[s - 1].forward(x, cache ? &cache->down_norms[s - 1]
                                              : nullptr);
      x = down_convs_[s - 1].forward(x, cache ? &cache->down_convs[s - 1]
                                              : nullptr);
    }
    Tensor stage_mask = resample_grid_nearest(grid, x.shape[1], x.shape[2]);
    x = nn::apply_plane(x, stage_mask);
    if (cache) {
      cache->stage_masks.push_back(stage_mask);
      cache->blocks[s].resize(stages_[s].size());
    }
    for (size_t b = 0; b < stages_[s].size(); ++b) {
      x = stages_[s][b].forward(x, cache ? &cache->blocks[s][b] : nullptr);
    }
  }

  if (cache) cache->pre_pool_shape = x.shape;
  x = nn::apply_plane(x, cache ? cache->stage_masks.back()
                               : resample_grid_nearest(grid, x.shape[1],
                                                       x.shape[2]));
  Tensor pooled = nn::global_avg_pool(x);
  return final_norm_.forward(pooled, cache ? &cache->final_norm : nullptr);
}

Tensor MaskedConvNet::backward(const NetCache& cache, const Tensor& dout) {
  Tensor d = final_norm_.backward(cache.final_norm, dout);
  d = nn::global_avg_pool_backward(cache.pre_pool_shape, d);
  d = nn::apply_plane_backward(cache.stage_masks.back(), d);
  for (size_t si = stages_.size(); si-- > 0;) {
    for (size_t b = stages_[si].size(); b-- > 0;) {
      d = stages_[si][b].backward(cache.blocks[si][b], d);
    }
    d = nn::apply_plane_backward(cache.stage_masks[si], d);
    if (si > 0) {
      d = down_convs_[si - 1].backward(cache.down_convs[si - 1], d);
      d = down_norms_[si - 1].backward(cache.down_norms[si - 1], d);
    }
  }
  d = stem_norm_.backward(cache.stem_norm, d);
  d = stem_.backward(cache.stem, d);
  return nn::apply_plane_backward(cache.input_mask, d);
}

void MaskedConvNet::params(nn::ParamRefs& out) {
  stem_.params(out);
  stem_norm_.params(out);
  for (size_t s = 0; s < stages_.size(); ++s) {
    if (s > 0) {
      down_norms_[s - 1].params(out);
      down_convs_[s - 1].params(out);
    }
    for (auto& block : stages_[s]) block.params(out);
  }
  final_norm_.params(out);
  if (cfg_.use_null_embedding) out.push_back(&null_embedding_);
}

size_t MaskedConvNet::param_count() {
  nn::ParamRefs refs;
  params(refs);
  size_t n = 0;
  for (const nn::Parameter* p : refs) n += p->value.numel();
  return n;
}

uint64_t MaskedConvNet::weights_hash() {
  nn::ParamRefs refs;
  params(refs);
  uint64_t h = 1469598103934665603ull;
  for (const nn::Parameter* p : refs) {
    h = fnv1a(p->name.data(), p->name.size(), h);
    h = fnv1a(p->value.data.data(), p->value.data.size() * sizeof(double), h);
  }
  return h;
}

Tensor extract(const Tensor& frame, const PatchGrid& grid,
               const MaskedConvNet& net, NetCache* cache) {
  if (grid.all_zero() && net.config().use_null_embedding) {
    if (cache) {
      *cache = NetCache{};
      cache->null_path = true;
    }
    return net.null_embedding_.value;
  }
  if (cache) cache->null_path = false;
  return net.forward(frame, grid, cache);
}

Tensor extract_backward(MaskedConvNet& net, const NetCache& cache,
                        const Tensor& dout) {
  if (cache.null_path) {
    for (size_t i = 0; i < dout.data.size(); ++i) {
      net.null_embedding_.grad.data[i] += dout.data[i];
    }
    return Tensor{};
  }
  return net.backward(cache, dout);
}

FrameFeatures extract_pair(const Tensor& frame, const PatchGrid& grid,
                           const MaskedConvNet& net, PairCache* cache) {
  FrameFeatures f;
  f.foreground = extract(frame, grid, net, cache ? &cache->foreground : nullptr);
  f.background =
      extract(frame, invert(grid), net, cache ? &cache->background : nullptr);
  return f;
}

Tensor frame_to_tensor(const ImageF& img) {
  static constexpr double kMean[3] = {0.485, 0.456, 0.406};
  static constexpr double kStd[3] = {0.229, 0.224, 0.225};
  if (img.channels != 1 && img.channels != 3) {
    throw ArgumentError("frame must have 1 or 3 channels");
  }
  Tensor t;
  t.shape = {3, img.height, img.width};
  t.data.resize(t.numel());
  const size_t hw = static_cast<size_t>(img.height) * img.width;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = img.channels == 1 ? img.at(y, x, 0) : img.at(y, x, c);
        t.data[static_cast<size_t>(c) * hw + static_cast<size_t>(y) * img.width +
               x] = (v - kMean[c]) / kStd[c];
      }
    }
  }
  return t;
}

}  // namespace zeal

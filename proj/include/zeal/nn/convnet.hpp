// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "zeal/image.hpp"
#include "zeal/mask/patch_grid.hpp"
#include "zeal/nn/layers.hpp"

namespace zeal {

// Stage stack description. The product stem_stride * down_strides must map
// the input resolution onto the final stage so a p=32 PatchGrid aligns with
// the last feature map (224 -> 7 at the paper's geometry).
struct ConvNetConfig {
  std::string preset = "nano";
  int in_channels = 3;
  int stem_kernel = 4;
  int stem_stride = 4;
  std::vector<int> depths{2, 2, 8, 2};
  std::vector<int> dims{80, 160, 320, 640};
  std::vector<int> down_strides{2, 2, 2};
  bool use_null_embedding = true;

  int total_downsample() const;
  int feature_dim() const { return dims.back(); }

  static ConvNetConfig micro();
  static ConvNetConfig nano();
  static ConvNetConfig from_preset(const std::string& name);
};

// Per-frame feature pair produced by the shared extractor.
struct FrameFeatures {
  Tensor foreground;
  Tensor background;
};

struct BlockCache {
  nn::Conv2dCache dw;
  nn::LayerNormCache ln;
  nn::Conv2dCache pw1;
  nn::GeluCache act;
  nn::Conv2dCache pw2;
};

// dw7x7 -> channel LayerNorm -> 1x1 expand (4x) -> GELU -> 1x1 project,
// with a residual connection.
class ConvNeXtBlock {
 public:
  ConvNeXtBlock() = default;
  ConvNeXtBlock(const std::string& name, int dim, Rng& rng);

  Tensor forward(const Tensor& x, BlockCache* cache) const;
  Tensor backward(const BlockCache& cache, const Tensor& dout);
  void params(nn::ParamRefs& out);

 private:
  nn::Conv2d dwconv_;
  nn::ChannelLayerNorm norm_;
  nn::Conv2d pw1_;
  nn::Conv2d pw2_;
};

struct NetCache {
  bool null_path = false;
  Tensor input_mask;
  nn::Conv2dCache stem;
  nn::LayerNormCache stem_norm;
  std::vector<nn::LayerNormCache> down_norms;
  std::vector<nn::Conv2dCache> down_convs;
  std::vector<Tensor> stage_masks;
  std::vector<std::vector<BlockCache>> blocks;
  std::vector<int> pre_pool_shape;
  nn::LayerNormCache final_norm;
};

// Masked convolutional feature extractor. The PatchGrid is resampled
// (nearest) to each stage's resolution and multiplied into the feature map
// before the stage's blocks, and once more before global pooling; the input
// image is masked the same way before the stem, which is what makes the
// network bitwise-insensitive to pixels under zero-valued patches.
class MaskedConvNet {
 public:
  MaskedConvNet() = default;
  MaskedConvNet(const ConvNetConfig& cfg, uint64_t seed);

  const ConvNetConfig& config() const { return cfg_; }
  int feature_dim() const { return cfg_.feature_dim(); }

  Tensor forward(const Tensor& frame, const PatchGrid& grid,
                 NetCache* cache) const;
  // Accumulates parameter grads; returns d(loss)/d(frame).
  Tensor backward(const NetCache& cache, const Tensor& dout);

  void params(nn::ParamRefs& out);
  size_t param_count();
  uint64_t weights_hash();

  nn::Parameter* null_embedding() { return &null_embedding_; }

 private:
  ConvNetConfig cfg_;
  nn::Conv2d stem_;
  nn::ChannelLayerNorm stem_norm_;
  std::vector<nn::ChannelLayerNorm> down_norms_;
  std::vector<nn::Conv2d> down_convs_;
  std::vector<std::vector<ConvNeXtBlock>> stages_;
  nn::ChannelLayerNorm final_norm_;
  nn::Parameter null_embedding_;

  friend Tensor extract(const Tensor&, const PatchGrid&, const MaskedConvNet&,
                        NetCache*);
  friend Tensor extract_backward(MaskedConvNet&, const NetCache&,
                                 const Tensor&);
};

// Nearest resampling of the patch grid to an (h, w) plane. Integer
// magnification replicates values exactly, preserving hard zeros.
Tensor resample_grid_nearest(const PatchGrid& grid, int h, int w);

// Pooled final-stage features; all-zero grids short-circuit to the learned
// null embedding when the config enables it.
Tensor extract(const Tensor& frame, const PatchGrid& grid,
               const MaskedConvNet& net, NetCache* cache);
Tensor extract_backward(MaskedConvNet& net, const NetCache& cache,
                        const Tensor& dout);

struct PairCache {
  NetCache foreground;
  NetCache background;
};

// foreground = extract(frame, grid), background = extract(frame, invert(grid)),
// through the same parameters.
FrameFeatures extract_pair(const Tensor& frame, const PatchGrid& grid,
                           const MaskedConvNet& net, PairCache* cache);

// (C,H,W) channel-normalized tensor from a decoded frame; single-channel
// images are replicated to three channels before normalization.
Tensor frame_to_tensor(const ImageF& img);

}  // namespace zeal

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "zeal/nn/lstm.hpp"

namespace zeal {

enum class HeadVariant { Bilstm, TemporalPoolMlp };

std::string head_variant_name(HeadVariant v);
HeadVariant head_variant_from_name(const std::string& name);

struct FeatureSequence {
  std::string video_id;
  Tensor foreground;  // (T, d)
  Tensor background;  // (T, d)
};

struct SkillScore {
  double normalized = 0.0;
  double raw = 0.0;
};

// GRS <-> model-space mapping; raw = 6 + 24 * clamp(normalized, 0, 1).
double normalize_grs(double grs);
double denormalize_score(double normalized);

struct HeadConfig {
  HeadVariant variant = HeadVariant::Bilstm;
  int input_dim = 640;           // d, extractor feature width
  int hidden = 256;              // h per direction (bilstm variant)
  std::vector<int> mlp_hidden{512, 128};

  // e: per-stream encoding width before pooling.
  int encode_dim() const {
    return variant == HeadVariant::Bilstm ? 2 * hidden : input_dim;
  }
};

struct HeadCache {
  int t_len = 0;
  nn::BiLstmCache fg_lstm, bg_lstm;
  Tensor concat;  // (2e) pooled+concatenated input to the readout
  nn::LinearCache out;
  nn::LinearCache mlp1, mlp2, mlp3;
  nn::GeluCache act1, act2;
};

// Arithmetic mean over the time axis of a (T, e) sequence. Accumulation is
// error-free (ExactSum), so the result is bitwise independent of frame order.
Tensor pool_time(const Tensor& seq);
Tensor pool_time_backward(int t_len, const Tensor& dout);

// Temporal scoring head. bilstm: a BiLstm per stream, temporal pooling,
// concatenation, one linear readout. temporal_pool_mlp: streams pass through
// unencoded, pooled, concatenated, then a 3-layer MLP.
class TemporalHead {
 public:
  TemporalHead() = default;
  TemporalHead(const HeadConfig& cfg, uint64_t seed);

  const HeadConfig& config() const { return cfg_; }

  // (T, e) encoding of one stream; background selects that stream's encoder
  // in the bilstm variant. The pass-through variant returns the input.
  Tensor encode_stream(const Tensor& seq, bool background = false,
                       nn::BiLstmCache* cache = nullptr) const;

  SkillScore score(const FeatureSequence& features, HeadCache* cache) const;
  // dnormalized: d(loss)/d(normalized score). Accumulates parameter grads;
  // when given, dfg/dbg receive d(loss)/d(stream) for end-to-end training.
  void backward(const HeadCache& cache, double dnormalized, Tensor* dfg,
                Tensor* dbg);

  void params(nn::ParamRefs& out);

 private:
  HeadConfig cfg_;
  nn::BiLstm fg_lstm_, bg_lstm_;
  nn::Linear out_;           // bilstm readout: (2e) -> 1
  nn::Linear mlp1_, mlp2_, mlp3_;
};

}  // namespace zeal

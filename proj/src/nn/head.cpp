// SPDX-License-Identifier: Apache-2.0
#include "zeal/nn/head.hpp"

#include <algorithm>

#include "zeal/common.hpp"
#include "zeal/data/dataset.hpp"

namespace zeal {

std::string head_variant_name(HeadVariant v) {
  return v == HeadVariant::Bilstm ? "bilstm" : "temporal_pool_mlp";
}

HeadVariant head_variant_from_name(const std::string& name) {
  if (name == "bilstm") return HeadVariant::Bilstm;
  if (name == "temporal_pool_mlp") return HeadVariant::TemporalPoolMlp;
  throw ArgumentError("unknown head variant '" + name +
                      "' (expected bilstm|temporal_pool_mlp)");
}

double normalize_grs(double grs) {
  return (grs - kGrsMin) / static_cast<double>(kGrsMax - kGrsMin);
}

double denormalize_score(double normalized) {
  const double c = std::clamp(normalized, 0.0, 1.0);
  return kGrsMin + (kGrsMax - kGrsMin) * c;
}

Tensor pool_time(const Tensor& seq) {
  if (seq.shape.size() != 2 || seq.shape[0] < 1) {
    throw ArgumentError("pool_time expects a nonempty (T, e) sequence");
  }
  const int t_len = seq.shape[0];
  const int e = seq.shape[1];
  Tensor out;
  out.shape = {e};
  out.data.resize(static_cast<size_t>(e));
  for (int j = 0; j < e; ++j) {
    nn::ExactSum acc;
    for (int t = 0; t < t_len; ++t) acc.add(seq.at2(t, j));
    out.data[static_cast<size_t>(j)] = acc.value() / static_cast<double>(t_len);
  }
  return out;
}

Tensor pool_time_backward(int t_len, const Tensor& dout) {
  const int e = static_cast<int>(dout.data.size());
  Tensor dx;
  dx.shape = {t_len, e};
  dx.data.resize(dx.numel());
  for (int t = 0; t < t_len; ++t) {
    for (int j = 0; j < e; ++j) {
      dx.at2(t, j) = dout.data[static_cast<size_t>(j)] / t_len;
    }
  }
  return dx;
}

TemporalHead::TemporalHead(const HeadConfig& cfg, uint64_t seed) : cfg_(cfg) {
  if (cfg_.input_dim < 1) throw ArgumentError("head input_dim must be >= 1");
  Rng rng = Rng(seed).fork("head");
  if (cfg_.variant == HeadVariant::Bilstm) {
    if (cfg_.hidden < 1) throw ArgumentError("bilstm hidden must be >= 1");
    fg_lstm_ = nn::BiLstm("head.fg", cfg_.input_dim, cfg_.hidden, rng);
    bg_lstm_ = nn::BiLstm("head.bg", cfg_.input_dim, cfg_.hidden, rng);
    out_ = nn::Linear("head.out", 2 * cfg_.encode_dim(), 1, rng);
  } else {
    if (cfg_.mlp_hidden.size() != 2) {
      throw ArgumentError("temporal_pool_mlp expects two hidden widths");
    }
    mlp1_ = nn::Linear("head.mlp1", 2 * cfg_.input_dim, cfg_.mlp_hidden[0], rng);
    mlp2_ = nn::Linear("head.mlp2", cfg_.mlp_hidden[0], cfg_.mlp_hidden[1], rng);
    mlp3_ = nn::Linear("head.mlp3", cfg_.mlp_hidden[1], 1, rng);
  }
}

Tensor TemporalHead::encode_stream(const Tensor& seq, bool background,
                                   nn::BiLstmCache* cache) const {
  if (seq.shape.size() != 2 || seq.shape[0] < 1 ||
      seq.shape[1] != cfg_.input_dim) {
    throw ArgumentError("stream must be (T, input_dim) with T >= 1");
  }
  if (cfg_.variant == HeadVariant::TemporalPoolMlp) return seq;
  return (background ? bg_lstm_ : fg_lstm_).forward(seq, cache);
}

SkillScore TemporalHead::score(const FeatureSequence& features,
                               HeadCache* cache) const {
  if (!features.foreground.same_shape(features.background)) {
    throw ArgumentError("foreground/background stream shapes differ");
  }
  const int t_len = features.foreground.shape[0];
  if (cache) cache->t_len = t_len;

  Tensor enc_fg = encode_stream(features.foreground, false,
                                cache ? &cache->fg_lstm : nullptr);
  Tensor enc_bg = encode_stream(features.background, true,
                                cache ? &cache->bg_lstm : nullptr);
  Tensor pf = pool_time(enc_fg);
  Tensor pb = pool_time(enc_bg);

  Tensor concat;
  concat.shape = {static_cast<int>(pf.data.size() + pb.data.size())};
  concat.data.reserve(pf.data.size() + pb.data.size());
  concat.data.insert(concat.data.end(), pf.data.begin(), pf.data.end());
  concat.data.insert(concat.data.end(), pb.data.begin(), pb.data.end());
  if (cache) cache->concat = concat;

  double normalized = 0.0;
  if (cfg_.variant == HeadVariant::Bilstm) {
    Tensor y = out_.forward(concat, cache ? &cache->out : nullptr);
    normalized = y.data[0];
  } else {
    Tensor h = mlp1_.forward(concat, cache ? &cache->mlp1 : nullptr);
    h = nn::gelu(h, cache ? &cache->act1 : nullptr);
    h = mlp2_.forward(h, cache ? &cache->mlp2 : nullptr);
    h = nn::gelu(h, cache ? &cache->act2 : nullptr);
    h = mlp3_.forward(h, cache ? &cache->mlp3 : nullptr);
    normalized = h.data[0];
  }
  return SkillScore{normalized, denormalize_score(normalized)};
}

void TemporalHead::backward(const HeadCache& cache, double dnormalized,
                            Tensor* dfg, Tensor* dbg) {
  Tensor dy;
  dy.shape = {1};
  dy.data = {dnormalized};

  Tensor dconcat;
  if (cfg_.variant == HeadVariant::Bilstm) {
    dconcat = out_.backward(cache.out, dy);
  } else {
    Tensor d = mlp3_.backward(cache.mlp3, dy);
    d = nn::gelu_backward(cache.act2, d);
    d = mlp2_.backward(cache.mlp2, d);
    d = nn::gelu_backward(cache.act1, d);
    dconcat = mlp1_.backward(cache.mlp1, d);
  }

  const int e = static_cast<int>(dconcat.data.size()) / 2;
  Tensor dpf, dpb;
  dpf.shape = {e};
  dpb.shape = {e};
  dpf.data.assign(dconcat.data.begin(), dconcat.data.begin() + e);
  dpb.data.assign(dconcat.data.begin() + e, dconcat.data.end());

  Tensor denc_fg = pool_time_backward(cache.t_len, dpf);
  Tensor denc_bg = pool_time_backward(cache.t_len, dpb);
  if (cfg_.variant == HeadVariant::Bilstm) {
    Tensor g_fg = fg_lstm_.backward(cache.fg_lstm, denc_fg);
    Tensor g_bg = bg_lstm_.backward(cache.bg_lstm, denc_bg);
    if (dfg) *dfg = std::move(g_fg);
    if (dbg) *dbg = std::move(g_bg);
  } else {
    if (dfg) *dfg = std::move(denc_fg);
    if (dbg) *dbg = std::move(denc_bg);
  }
}

void TemporalHead::params(nn::ParamRefs& out) {
  if (cfg_.variant == HeadVariant::Bilstm) {
    fg_lstm_.params(out);
    bg_lstm_.params(out);
    out_.params(out);
  } else {
    mlp1_.params(out);
    mlp2_.params(out);
    mlp3_.params(out);
  }
}

}  // namespace zeal

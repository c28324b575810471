// SPDX-License-Identifier: Apache-2.0
#include "zeal/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "zeal/mask/patch_grid.hpp"
#include "zeal/nn/optim.hpp"
#include "zeal/tensor_file.hpp"
#include "zeal/train/augment.hpp"
#include "zeal/train/loss.hpp"
#include "zeal/train/schedule.hpp"

namespace zeal {

using nlohmann::json;

nn::ParamRefs Model::all_params() {
  nn::ParamRefs out;
  net.params(out);
  head.params(out);
  return out;
}

nn::ParamRefs Model::trainable_params(bool freeze_extractor) {
  nn::ParamRefs out;
  if (!freeze_extractor) net.params(out);
  head.params(out);
  return out;
}

Model build_model(const TrainConfig& cfg) {
  cfg.validate();
  ConvNetConfig net_cfg = ConvNetConfig::from_preset(cfg.preset);
  net_cfg.use_null_embedding = cfg.use_null_embedding;
  HeadConfig head_cfg;
  head_cfg.variant = head_variant_from_name(cfg.variant);
  head_cfg.input_dim = net_cfg.feature_dim();
  head_cfg.hidden = cfg.hidden;
  Model model;
  model.net = MaskedConvNet(net_cfg, cfg.seed);
  model.head = TemporalHead(head_cfg, cfg.seed);
  return model;
}

PreparedVideo prepare_video(const VideoSample& video,
                            const std::vector<BinaryMask>& masks,
                            const TrainConfig& cfg) {
  if (!video.decoded())
    throw DataError("prepare_video: video '" + video.id +
                    "' has no decoded frames");
  if (masks.size() != video.frames.size())
    throw ArgumentError("prepare_video: " + std::to_string(masks.size()) +
                        " masks for " + std::to_string(video.frames.size()) +
                        " frames of video '" + video.id + "'");
  PreparedVideo out;
  out.id = video.id;
  out.task = video.task;
  out.grs = video.grs;
  const std::vector<int> picks =
      sample_frames(static_cast<int>(video.frames.size()), cfg.sample_count);
  out.frames.reserve(picks.size());
  out.masks.reserve(picks.size());
  for (int idx : picks) {
    const ImageF full = to_float(video.frames[static_cast<std::size_t>(idx)]);
    out.frames.push_back(resize_bilinear(full, cfg.image_size, cfg.image_size));
    out.masks.push_back(resize_mask_nearest(masks[static_cast<std::size_t>(idx)],
                                            cfg.image_size, cfg.image_size));
  }
  return out;
}

FeatureSequence extract_features(const PreparedVideo& video,
                                 const MaskedConvNet& net, int patch) {
  const int t_len = static_cast<int>(video.frames.size());
  const int d = net.feature_dim();
  FeatureSequence out;
  out.video_id = video.id;
  out.foreground = Tensor({t_len, d});
  out.background = Tensor({t_len, d});
  for (int t = 0; t < t_len; ++t) {
    const Tensor frame = frame_to_tensor(video.frames[static_cast<std::size_t>(t)]);
    const PatchGrid grid = patchify(video.masks[static_cast<std::size_t>(t)], patch);
    const FrameFeatures feats = extract_pair(frame, grid, net, nullptr);
    for (int j = 0; j < d; ++j) {
      out.foreground.at2(t, j) = feats.foreground.data[static_cast<std::size_t>(j)];
      out.background.at2(t, j) = feats.background.data[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

// ---- Feature cache ---------------------------------------------------------

namespace {

json feature_key_json(const FeatureCacheKey& key) {
  return json{{"preset", key.preset},
              {"weights_hash", hex64(key.weights_hash)},
              {"text_prompt", key.mask_key.text_prompt},
              {"box_threshold", key.mask_key.box_threshold},
              {"iou_dedup", key.mask_key.iou_dedup},
              {"backend_id", key.mask_key.backend_id},
              {"image_size", key.image_size},
              {"sample_count", key.sample_count},
              {"patch", key.patch},
              {"use_null_embedding", key.use_null_embedding}};
}

}  // namespace

std::filesystem::path feature_cache_path(const std::filesystem::path& cache_root,
                                         const std::string& video_id) {
  return cache_root / (video_id + ".tensors");
}

void write_feature_cache(const std::filesystem::path& cache_root,
                         const FeatureSequence& features,
                         const FeatureCacheKey& key) {
  std::filesystem::create_directories(cache_root);
  TensorFile file;
  file.metadata = feature_key_json(key);
  file.metadata["video_id"] = features.video_id;
  file.arrays["foreground"] = features.foreground;
  file.arrays["background"] = features.background;
  file.save(feature_cache_path(cache_root, features.video_id));
}

std::optional<FeatureSequence> load_feature_cache(
    const std::filesystem::path& cache_root, const std::string& video_id,
    const FeatureCacheKey& key) {
  const auto path = feature_cache_path(cache_root, video_id);
  if (!std::filesystem::exists(path)) return std::nullopt;
  TensorFile file;
  try {
    file = TensorFile::load(path);
  } catch (const Error&) {
    return std::nullopt;
  }
  json expected = feature_key_json(key);
  expected["video_id"] = video_id;
  for (auto it = expected.begin(); it != expected.end(); ++it) {
    if (!file.metadata.contains(it.key()) || file.metadata[it.key()] != it.value())
      return std::nullopt;
  }
  auto fg = file.arrays.find("foreground");
  auto bg = file.arrays.find("background");
  if (fg == file.arrays.end() || bg == file.arrays.end()) return std::nullopt;
  FeatureSequence out;
  out.video_id = video_id;
  out.foreground = fg->second;
  out.background = bg->second;
  return out;
}

// ---- Checkpoints -----------------------------------------------------------

namespace {

std::string param_key(std::size_t index, const std::string& name) {
  std::ostringstream os;
  os << 'p' << std::setw(4) << std::setfill('0') << index << '.' << name;
  return os.str();
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, Model& model,
                     const TrainConfig& cfg, int epoch, double val_loss,
                     const std::vector<Tensor>& param_values) {
  const nn::ParamRefs params = model.all_params();
  if (params.size() != param_values.size())
    throw ArgumentError("save_checkpoint: " +
                        std::to_string(param_values.size()) + " values for " +
                        std::to_string(params.size()) + " parameters");
  TensorFile file;
  file.metadata = json{{"format", "zeal-checkpoint-v1"},
                       {"config", json(cfg)},
                       {"config_hash", hex64(config_hash(cfg))},
                       {"variant", cfg.variant},
                       {"preset", cfg.preset},
                       {"d", model.net.feature_dim()},
                       {"h", cfg.hidden},
                       {"normalization", "grs = 6 + 24 * clamp(score, 0, 1)"},
                       {"epoch", epoch},
                       {"val_loss", val_loss}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->value.same_shape(param_values[i]))
      throw ArgumentError("save_checkpoint: shape mismatch for parameter '" +
                          params[i]->name + "'");
    file.arrays[param_key(i, params[i]->name)] = param_values[i];
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  file.save(path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw DataError("load_checkpoint: no checkpoint at " + path.string());
  const TensorFile file = TensorFile::load(path);
  if (file.metadata.value("format", "") != "zeal-checkpoint-v1")
    throw DataError("load_checkpoint: unrecognized format in " + path.string());
  LoadedCheckpoint out;
  out.config = file.metadata.at("config").get<TrainConfig>();
  out.epoch = file.metadata.value("epoch", -1);
  out.val_loss = file.metadata.value("val_loss", 0.0);
  out.config_hash = config_hash(out.config);
  if (file.metadata.value("config_hash", "") != hex64(out.config_hash))
    throw DataError("load_checkpoint: config hash mismatch in " + path.string());
  out.model = build_model(out.config);
  const nn::ParamRefs params = out.model.all_params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string key = param_key(i, params[i]->name);
    auto it = file.arrays.find(key);
    if (it == file.arrays.end())
      throw DataError("load_checkpoint: missing parameter '" + key + "'");
    if (!params[i]->value.same_shape(it->second))
      throw DataError("load_checkpoint: shape mismatch for parameter '" + key +
                      "'");
    params[i]->value = it->second;
  }
  if (file.arrays.size() != params.size())
    throw DataError("load_checkpoint: parameter count mismatch");
  return out;
}

// ---- Fold training ---------------------------------------------------------

namespace {

Tensor row_of(const Tensor& seq, int t) {
  const int d = seq.dim(1);
  Tensor out({d});
  for (int j = 0; j < d; ++j) out.data[static_cast<std::size_t>(j)] = seq.at2(t, j);
  return out;
}

struct ForwardState {
  double prediction = 0.0;                 // normalized score
  HeadCache head_cache;
  std::vector<PairCache> frame_caches;     // empty when the extractor is frozen
};

// Forward one video; fills caches only when grads are needed.
ForwardState forward_video(const PreparedVideo& video, const Model& model,
                           const TrainConfig& cfg, bool need_grad,
                           Rng* aug_rng) {
  ForwardState state;
  const int t_len = static_cast<int>(video.frames.size());
  const int d = model.net.feature_dim();
  FeatureSequence feats;
  feats.video_id = video.id;
  feats.foreground = Tensor({t_len, d});
  feats.background = Tensor({t_len, d});
  if (need_grad) state.frame_caches.resize(static_cast<std::size_t>(t_len));
  for (int t = 0; t < t_len; ++t) {
    ImageF frame = video.frames[static_cast<std::size_t>(t)];
    BinaryMask mask = video.masks[static_cast<std::size_t>(t)];
    if (aug_rng != nullptr) augment_sample(frame, mask, cfg.augment, *aug_rng);
    const Tensor x = frame_to_tensor(frame);
    const PatchGrid grid = patchify(mask, cfg.patch);
    PairCache* cache =
        need_grad ? &state.frame_caches[static_cast<std::size_t>(t)] : nullptr;
    const FrameFeatures f = extract_pair(x, grid, model.net, cache);
    for (int j = 0; j < d; ++j) {
      feats.foreground.at2(t, j) = f.foreground.data[static_cast<std::size_t>(j)];
      feats.background.at2(t, j) = f.background.data[static_cast<std::size_t>(j)];
    }
  }
  state.prediction =
      model.head.score(feats, need_grad ? &state.head_cache : nullptr).normalized;
  return state;
}

double predict_from_features(const FeatureSequence& feats, const Model& model) {
  return model.head.score(feats, nullptr).normalized;
}

}  // namespace

TrainResult train_fold(const std::vector<VideoSample>& dataset,
                       const FoldAssignment& fold, const TrainConfig& cfg,
                       const TrainPaths& paths, SegmenterBackend& backend) {
  cfg.validate();
  if (fold.train.empty()) throw DataError("train_fold: empty training split");
  if (fold.val.empty()) throw DataError("train_fold: empty validation split");

  std::unordered_map<std::string, const VideoSample*> by_id;
  for (const VideoSample& v : dataset) by_id[v.id] = &v;
  auto find_video = [&](const std::string& id) -> const VideoSample& {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw DataError("train_fold: fold references unknown video '" + id + "'");
    return *it->second;
  };

  Model model = build_model(cfg);
  const std::uint64_t init_weights_hash = model.net.weights_hash();

  // Masks once per video, cached; prepared frames stay resident for the run.
  const auto mask_root = paths.cache_dir / "masks";
  std::unordered_map<std::string, PreparedVideo> prepared;
  auto prepare = [&](const std::string& id) {
    if (prepared.count(id)) return;
    const VideoSample& video = find_video(id);
    const auto masks = ensure_video_masks(mask_root, video, cfg.mask, backend);
    prepared.emplace(id, prepare_video(video, masks, cfg));
  };
  for (const auto& id : fold.train) prepare(id);
  for (const auto& id : fold.val) prepare(id);

  // Frozen extractor: features are constant, so compute them once through
  // the on-disk cache and train the head alone.
  std::unordered_map<std::string, FeatureSequence> frozen_feats;
  if (cfg.freeze_extractor) {
    FeatureCacheKey key;
    key.preset = cfg.preset;
    key.weights_hash = init_weights_hash;
    key.mask_key = MaskCacheKey{cfg.mask.text_prompt, cfg.mask.box_threshold,
                                cfg.mask.iou_dedup, backend.identifier()};
    key.image_size = cfg.image_size;
    key.sample_count = cfg.sample_count;
    key.patch = cfg.patch;
    key.use_null_embedding = cfg.use_null_embedding;
    const auto feat_root = paths.cache_dir / "features";
    for (const auto& [id, video] : prepared) {
      auto cached = load_feature_cache(feat_root, id, key);
      if (!cached) {
        cached = extract_features(video, model.net, cfg.patch);
        write_feature_cache(feat_root, *cached, key);
      }
      frozen_feats.emplace(id, std::move(*cached));
    }
  }

  const nn::ParamRefs trainable = model.trainable_params(cfg.freeze_extractor);
  nn::AdamW opt(cfg.weight_decay);
  const int n_train = static_cast<int>(fold.train.size());
  const int steps_per_epoch = (n_train + cfg.batch_size - 1) / cfg.batch_size;

  std::filesystem::create_directories(paths.out_dir);
  TrainResult result;
  result.checkpoint_path = paths.out_dir / "checkpoint.tensors";
  result.log_path = paths.out_dir / "train_log.jsonl";
  std::ofstream log_file(result.log_path, std::ios::trunc);
  if (!log_file) throw DataError("train_fold: cannot write " + result.log_path.string());

  const Rng root(cfg.seed);
  std::vector<Tensor> best_values;
  std::int64_t global_step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<int> order(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng shuffle_rng = root.fork("epoch-shuffle-" + std::to_string(epoch));
    for (int i = n_train - 1; i > 0; --i)
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(shuffle_rng.uniform_int(0, i))]);

    double train_loss_sum = 0.0;
    for (int step = 0; step < steps_per_epoch; ++step) {
      const int begin = step * cfg.batch_size;
      const int end = std::min(n_train, begin + cfg.batch_size);
      const int batch_n = end - begin;

      std::vector<double> preds(static_cast<std::size_t>(batch_n));
      std::vector<double> targets(static_cast<std::size_t>(batch_n));
      std::vector<ForwardState> states(static_cast<std::size_t>(batch_n));
      for (int b = 0; b < batch_n; ++b) {
        const std::string& id = fold.train[static_cast<std::size_t>(
            order[static_cast<std::size_t>(begin + b)])];
        const PreparedVideo& video = prepared.at(id);
        targets[static_cast<std::size_t>(b)] = normalize_grs(video.grs);
        if (cfg.freeze_extractor) {
          auto& st = states[static_cast<std::size_t>(b)];
          st.prediction =
              model.head.score(frozen_feats.at(id), &st.head_cache).normalized;
        } else {
          Rng aug_rng =
              root.fork("aug-" + id + "-" + std::to_string(epoch));
          states[static_cast<std::size_t>(b)] =
              forward_video(video, model, cfg, true, &aug_rng);
        }
        preds[static_cast<std::size_t>(b)] =
            states[static_cast<std::size_t>(b)].prediction;
      }

      const LossResult batch =
          compute_loss(cfg.loss, preds, targets, cfg.spearman_tau);
      if (!std::isfinite(batch.value))
        throw PipelineError("train_fold: non-finite loss at epoch " +
                            std::to_string(epoch) + " step " +
                            std::to_string(step));
      train_loss_sum += batch.value * batch_n;

      nn::zero_grads(trainable);
      for (int b = 0; b < batch_n; ++b) {
        ForwardState& st = states[static_cast<std::size_t>(b)];
        Tensor dfg, dbg;
        model.head.backward(st.head_cache, batch.dpred[static_cast<std::size_t>(b)],
                            &dfg, &dbg);
        if (!cfg.freeze_extractor) {
          for (int t = 0; t < static_cast<int>(st.frame_caches.size()); ++t) {
            auto& pc = st.frame_caches[static_cast<std::size_t>(t)];
            extract_backward(model.net, pc.foreground, row_of(dfg, t));
            extract_backward(model.net, pc.background, row_of(dbg, t));
          }
        }
      }
      nn::clip_grad_norm(trainable, cfg.grad_clip);
      opt.step(trainable, lr_at(global_step, steps_per_epoch, cfg));
      ++global_step;
    }
    const double train_loss = train_loss_sum / n_train;

    std::vector<double> val_preds, val_targets;
    val_preds.reserve(fold.val.size());
    val_targets.reserve(fold.val.size());
    for (const auto& id : fold.val) {
      const PreparedVideo& video = prepared.at(id);
      if (cfg.freeze_extractor)
        val_preds.push_back(predict_from_features(frozen_feats.at(id), model));
      else
        val_preds.push_back(
            forward_video(video, model, cfg, false, nullptr).prediction);
      val_targets.push_back(normalize_grs(video.grs));
    }
    const double val_loss =
        compute_loss(cfg.loss, val_preds, val_targets, cfg.spearman_tau).value;
    if (!std::isfinite(val_loss))
      throw PipelineError("train_fold: non-finite validation loss at epoch " +
                          std::to_string(epoch));

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = train_loss;
    stats.val_loss = val_loss;
    stats.lr = lr_at(static_cast<std::int64_t>(epoch) * steps_per_epoch,
                     steps_per_epoch, cfg);
    result.log.push_back(stats);
    log_file << json{{"epoch", stats.epoch},
                     {"train_loss", stats.train_loss},
                     {"val_loss", stats.val_loss},
                     {"lr", stats.lr}}
                    .dump()
             << '\n';
    log_file.flush();

    if (result.best_epoch < 0 || val_loss < result.best_val_loss) {
      result.best_epoch = epoch;
      result.best_val_loss = val_loss;
      best_values.clear();
      for (nn::Parameter* p : model.all_params()) best_values.push_back(p->value);
    }
  }

  for (const auto& id : fold.train) {
    const double pred =
        cfg.freeze_extractor
            ? predict_from_features(frozen_feats.at(id), model)
            : forward_video(prepared.at(id), model, cfg, false, nullptr)
                  .prediction;
    result.final_train_predictions.emplace_back(id, pred);
  }

  save_checkpoint(result.checkpoint_path, model, cfg, result.best_epoch,
                  result.best_val_loss, best_values);
  return result;
}

}  // namespace zeal

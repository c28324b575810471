// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zeal/data/dataset.hpp"
#include "zeal/mask/pipeline.hpp"
#include "zeal/nn/convnet.hpp"
#include "zeal/nn/head.hpp"
#include "zeal/train/config.hpp"

namespace zeal {

// Extractor + head pair built from one TrainConfig; parameters are owned
// here and referenced by the optimizer.
struct Model {
  MaskedConvNet net;
  TemporalHead head;

  nn::ParamRefs all_params();
  nn::ParamRefs trainable_params(bool freeze_extractor);
};

Model build_model(const TrainConfig& cfg);

// One video reduced to its sampled, resized frames and registered masks.
struct PreparedVideo {
  std::string id;
  Task task = Task::SYNTH;
  int grs = kGrsMin;
  std::vector<ImageF> frames;
  std::vector<BinaryMask> masks;
};

PreparedVideo prepare_video(const VideoSample& video,
                            const std::vector<BinaryMask>& masks,
                            const TrainConfig& cfg);

// Clean-pass (no augmentation) feature sequences for one prepared video.
FeatureSequence extract_features(const PreparedVideo& video,
                                 const MaskedConvNet& net, int patch);

// ---- Feature cache -------------------------------------------------------

struct FeatureCacheKey {
  std::string preset;
  std::uint64_t weights_hash = 0;
  MaskCacheKey mask_key;
  int image_size = 0;
  int sample_count = 0;
  int patch = 0;
  bool use_null_embedding = true;
};

std::filesystem::path feature_cache_path(const std::filesystem::path& cache_root,
                                         const std::string& video_id);
void write_feature_cache(const std::filesystem::path& cache_root,
                         const FeatureSequence& features,
                         const FeatureCacheKey& key);
std::optional<FeatureSequence> load_feature_cache(
    const std::filesystem::path& cache_root, const std::string& video_id,
    const FeatureCacheKey& key);

// ---- Checkpoints -----------------------------------------------------------

void save_checkpoint(const std::filesystem::path& path, Model& model,
                     const TrainConfig& cfg, int epoch, double val_loss,
                     const std::vector<Tensor>& param_values);

struct LoadedCheckpoint {
  Model model;
  TrainConfig config;
  int epoch = -1;
  double val_loss = 0.0;
  std::uint64_t config_hash = 0;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// ---- Fold training ---------------------------------------------------------

struct TrainPaths {
  std::filesystem::path cache_dir;  // masks/ and features/ live here
  std::filesystem::path out_dir;    // checkpoint, run log
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::filesystem::path checkpoint_path;
  std::filesystem::path log_path;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  std::vector<EpochStats> log;
  // Clean-pass normalized predictions on the training split with the
  // end-of-schedule weights; fit diagnostic, not used for test metrics.
  std::vector<std::pair<std::string, double>> final_train_predictions;
};

// Full schedule on one fold; selects the minimum-validation-loss epoch and
// writes checkpoint.tensors plus train_log.jsonl under paths.out_dir.
TrainResult train_fold(const std::vector<VideoSample>& dataset,
                       const FoldAssignment& fold, const TrainConfig& cfg,
                       const TrainPaths& paths, SegmenterBackend& backend);

}  // namespace zeal

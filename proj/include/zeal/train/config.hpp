// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "zeal/mask/pipeline.hpp"

namespace zeal {

// Per-transform application probabilities and ranges. Geometric transforms
// (shift/scale/rotation) are combined into one affine warp applied
// identically to the frame and its mask; photometric transforms touch the
// frame only.
struct AugmentConfig {
  double p_shift = 0.5;
  double max_shift_frac = 0.1;   // of the image side
  double p_scale = 0.5;
  double scale_min = 0.9;
  double scale_max = 1.1;
  double p_rotate = 0.5;
  double max_rotate_deg = 10.0;
  double p_color = 0.5;
  double brightness = 0.2;       // multiplicative jitter half-range
  double contrast = 0.2;
  double p_blur = 0.2;
  double blur_sigma_min = 0.3;
  double blur_sigma_max = 1.2;
  double p_noise = 0.2;
  double noise_std = 0.02;

  static AugmentConfig off();
};

struct TrainConfig {
  int epochs = 200;
  int warmup_epochs = 20;
  double max_lr = 3e-5;
  double min_lr = 0.0;
  double weight_decay = 0.01;
  double grad_clip = 1.0;
  int batch_size = 2;            // videos per optimizer step
  std::uint64_t seed = 0;
  int sample_count = 160;        // frames sampled per video
  int image_size = 224;
  int patch = 32;
  std::string preset = "nano";
  std::string variant = "bilstm";
  int hidden = 256;
  bool freeze_extractor = false;
  bool use_null_embedding = true;
  std::string loss = "mse";      // mse | soft_spearman
  double spearman_tau = 0.1;
  std::string backend = "stub";
  AugmentConfig augment;
  MaskConfig mask;

  void validate() const;
};

void to_json(nlohmann::json& j, const AugmentConfig& c);
void from_json(const nlohmann::json& j, AugmentConfig& c);
void to_json(nlohmann::json& j, const MaskConfig& c);
void from_json(const nlohmann::json& j, MaskConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

// Hash of the canonical JSON form; covers every semantic field above and
// nothing else (no paths, no timestamps).
std::uint64_t config_hash(const TrainConfig& cfg);

}  // namespace zeal

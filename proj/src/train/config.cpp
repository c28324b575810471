// SPDX-License-Identifier: Apache-2.0
#include "zeal/train/config.hpp"

#include "zeal/common.hpp"

namespace zeal {

using nlohmann::json;

AugmentConfig AugmentConfig::off() {
  AugmentConfig c;
  c.p_shift = 0.0;
  c.p_scale = 0.0;
  c.p_rotate = 0.0;
  c.p_color = 0.0;
  c.p_blur = 0.0;
  c.p_noise = 0.0;
  return c;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (warmup_epochs < 0 || warmup_epochs >= epochs) {
    throw ArgumentError("warmup_epochs must lie in [0, epochs)");
  }
  if (!(max_lr > 0.0)) throw ArgumentError("max_lr must be positive");
  if (min_lr < 0.0 || min_lr > max_lr) {
    throw ArgumentError("min_lr must lie in [0, max_lr]");
  }
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (sample_count < 1) throw ArgumentError("sample_count must be >= 1");
  if (patch < 1) throw ArgumentError("patch must be >= 1");
  if (image_size < patch || image_size % patch != 0) {
    throw ArgumentError("image_size must be a positive multiple of patch");
  }
  if (hidden < 1) throw ArgumentError("hidden must be >= 1");
  if (loss != "mse" && loss != "soft_spearman") {
    throw ArgumentError("loss must be mse|soft_spearman");
  }
  if (grad_clip < 0.0) throw ArgumentError("grad_clip must be >= 0");
  if (weight_decay < 0.0) throw ArgumentError("weight_decay must be >= 0");
  if (spearman_tau <= 0.0) throw ArgumentError("spearman_tau must be positive");
}

void to_json(json& j, const AugmentConfig& c) {
  j = json{{"p_shift", c.p_shift},
           {"max_shift_frac", c.max_shift_frac},
           {"p_scale", c.p_scale},
           {"scale_min", c.scale_min},
           {"scale_max", c.scale_max},
           {"p_rotate", c.p_rotate},
           {"max_rotate_deg", c.max_rotate_deg},
           {"p_color", c.p_color},
           {"brightness", c.brightness},
           {"contrast", c.contrast},
           {"p_blur", c.p_blur},
           {"blur_sigma_min", c.blur_sigma_min},
           {"blur_sigma_max", c.blur_sigma_max},
           {"p_noise", c.p_noise},
           {"noise_std", c.noise_std}};
}

void from_json(const json& j, AugmentConfig& c) {
  AugmentConfig d;
  c.p_shift = j.value("p_shift", d.p_shift);
  c.max_shift_frac = j.value("max_shift_frac", d.max_shift_frac);
  c.p_scale = j.value("p_scale", d.p_scale);
  c.scale_min = j.value("scale_min", d.scale_min);
  c.scale_max = j.value("scale_max", d.scale_max);
  c.p_rotate = j.value("p_rotate", d.p_rotate);
  c.max_rotate_deg = j.value("max_rotate_deg", d.max_rotate_deg);
  c.p_color = j.value("p_color", d.p_color);
  c.brightness = j.value("brightness", d.brightness);
  c.contrast = j.value("contrast", d.contrast);
  c.p_blur = j.value("p_blur", d.p_blur);
  c.blur_sigma_min = j.value("blur_sigma_min", d.blur_sigma_min);
  c.blur_sigma_max = j.value("blur_sigma_max", d.blur_sigma_max);
  c.p_noise = j.value("p_noise", d.p_noise);
  c.noise_std = j.value("noise_std", d.noise_std);
}

void to_json(json& j, const MaskConfig& c) {
  j = json{{"text_prompt", c.text_prompt},
           {"box_threshold", c.box_threshold},
           {"iou_dedup", c.iou_dedup},
           {"zero_mask_fallback", c.zero_mask_fallback}};
}

void from_json(const json& j, MaskConfig& c) {
  MaskConfig d;
  c.text_prompt = j.value("text_prompt", d.text_prompt);
  c.box_threshold = j.value("box_threshold", d.box_threshold);
  c.iou_dedup = j.value("iou_dedup", d.iou_dedup);
  c.zero_mask_fallback = j.value("zero_mask_fallback", d.zero_mask_fallback);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"epochs", c.epochs},
           {"warmup_epochs", c.warmup_epochs},
           {"max_lr", c.max_lr},
           {"min_lr", c.min_lr},
           {"weight_decay", c.weight_decay},
           {"grad_clip", c.grad_clip},
           {"batch_size", c.batch_size},
           {"seed", c.seed},
           {"sample_count", c.sample_count},
           {"image_size", c.image_size},
           {"patch", c.patch},
           {"preset", c.preset},
           {"variant", c.variant},
           {"hidden", c.hidden},
           {"freeze_extractor", c.freeze_extractor},
           {"use_null_embedding", c.use_null_embedding},
           {"loss", c.loss},
           {"spearman_tau", c.spearman_tau},
           {"backend", c.backend},
           {"augment", c.augment},
           {"mask", c.mask}};
}

void from_json(const json& j, TrainConfig& c) {
  TrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.warmup_epochs = j.value("warmup_epochs", d.warmup_epochs);
  c.max_lr = j.value("max_lr", d.max_lr);
  c.min_lr = j.value("min_lr", d.min_lr);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.grad_clip = j.value("grad_clip", d.grad_clip);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.seed = j.value("seed", d.seed);
  c.sample_count = j.value("sample_count", d.sample_count);
  c.image_size = j.value("image_size", d.image_size);
  c.patch = j.value("patch", d.patch);
  c.preset = j.value("preset", d.preset);
  c.variant = j.value("variant", d.variant);
  c.hidden = j.value("hidden", d.hidden);
  c.freeze_extractor = j.value("freeze_extractor", d.freeze_extractor);
  c.use_null_embedding = j.value("use_null_embedding", d.use_null_embedding);
  c.loss = j.value("loss", d.loss);
  c.spearman_tau = j.value("spearman_tau", d.spearman_tau);
  c.backend = j.value("backend", d.backend);
  if (j.contains("augment")) c.augment = j.at("augment").get<AugmentConfig>();
  if (j.contains("mask")) c.mask = j.at("mask").get<MaskConfig>();
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  const std::string canonical = json(cfg).dump();
  return fnv1a(canonical);
}

}  // namespace zeal

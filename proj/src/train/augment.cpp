// SPDX-License-Identifier: Apache-2.0
#include "zeal/train/augment.hpp"

#include <algorithm>
#include <cmath>

#include "zeal/common.hpp"

namespace zeal {

namespace {

double sample_bilinear_clamped(const ImageF& img, double y, double x, int c) {
  const int y0 = static_cast<int>(std::floor(y));
  const int x0 = static_cast<int>(std::floor(x));
  const double fy = y - y0;
  const double fx = x - x0;
  auto clampy = [&](int v) { return std::clamp(v, 0, img.height - 1); };
  auto clampx = [&](int v) { return std::clamp(v, 0, img.width - 1); };
  const double v00 = img.at(clampy(y0), clampx(x0), c);
  const double v01 = img.at(clampy(y0), clampx(x0 + 1), c);
  const double v10 = img.at(clampy(y0 + 1), clampx(x0), c);
  const double v11 = img.at(clampy(y0 + 1), clampx(x0 + 1), c);
  return v00 * (1 - fy) * (1 - fx) + v01 * (1 - fy) * fx +
         v10 * fy * (1 - fx) + v11 * fy * fx;
}

void gaussian_blur(ImageF& img, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(2.5 * sigma)));
  std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[static_cast<size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;

  ImageF tmp(img.height, img.width, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int xx = std::clamp(x + i, 0, img.width - 1);
          acc += kernel[static_cast<size_t>(i + radius)] * img.at(y, xx, c);
        }
        tmp.at(y, x, c) = acc;
      }
    }
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int yy = std::clamp(y + i, 0, img.height - 1);
          acc += kernel[static_cast<size_t>(i + radius)] * tmp.at(yy, x, c);
        }
        img.at(y, x, c) = acc;
      }
    }
  }
}

}  // namespace

void augment_sample(ImageF& frame, BinaryMask& mask, const AugmentConfig& cfg,
                    Rng& rng) {
  if (frame.height != mask.height || frame.width != mask.width) {
    throw ArgumentError("augment: frame and mask dimensions differ");
  }

  // Geometric: forward map p_out = R(theta) * s * (p_in - c) + c + t, so
  // output pixels sample the input at the inverse position.
  double shift_x = 0.0, shift_y = 0.0, scale = 1.0, theta = 0.0;
  bool geometric = false;
  if (cfg.p_shift > 0.0 && rng.bernoulli(cfg.p_shift)) {
    shift_x = rng.uniform(-cfg.max_shift_frac, cfg.max_shift_frac) * frame.width;
    shift_y = rng.uniform(-cfg.max_shift_frac, cfg.max_shift_frac) * frame.height;
    geometric = true;
  }
  if (cfg.p_scale > 0.0 && rng.bernoulli(cfg.p_scale)) {
    scale = rng.uniform(cfg.scale_min, cfg.scale_max);
    geometric = true;
  }
  if (cfg.p_rotate > 0.0 && rng.bernoulli(cfg.p_rotate)) {
    theta = rng.uniform(-cfg.max_rotate_deg, cfg.max_rotate_deg) * M_PI / 180.0;
    geometric = true;
  }
  if (geometric) {
    const double cy = 0.5 * (frame.height - 1);
    const double cx = 0.5 * (frame.width - 1);
    const double cos_t = std::cos(-theta), sin_t = std::sin(-theta);
    const double inv_s = 1.0 / scale;
    ImageF warped(frame.height, frame.width, frame.channels);
    BinaryMask warped_mask(mask.height, mask.width, mask.frame_index);
    for (int y = 0; y < frame.height; ++y) {
      for (int x = 0; x < frame.width; ++x) {
        const double oy = y - cy - shift_y;
        const double ox = x - cx - shift_x;
        const double sy = inv_s * (sin_t * ox + cos_t * oy) + cy;
        const double sx = inv_s * (cos_t * ox - sin_t * oy) + cx;
        for (int c = 0; c < frame.channels; ++c) {
          warped.at(y, x, c) = sample_bilinear_clamped(frame, sy, sx, c);
        }
        const int my = static_cast<int>(std::lround(sy));
        const int mx = static_cast<int>(std::lround(sx));
        warped_mask.at(y, x) =
            (my >= 0 && my < mask.height && mx >= 0 && mx < mask.width)
                ? mask.at(my, mx)
                : 0;
      }
    }
    frame = std::move(warped);
    mask = std::move(warped_mask);
  }

  bool photometric = false;
  if (cfg.p_color > 0.0 && rng.bernoulli(cfg.p_color)) {
    photometric = true;
    const double bf = rng.uniform(1.0 - cfg.brightness, 1.0 + cfg.brightness);
    for (double& v : frame.data) v *= bf;
    const double cf = rng.uniform(1.0 - cfg.contrast, 1.0 + cfg.contrast);
    double mean = 0.0;
    for (double v : frame.data) mean += v;
    mean /= static_cast<double>(frame.data.size());
    for (double& v : frame.data) v = mean + (v - mean) * cf;
  }
  if (cfg.p_blur > 0.0 && rng.bernoulli(cfg.p_blur)) {
    photometric = true;
    gaussian_blur(frame, rng.uniform(cfg.blur_sigma_min, cfg.blur_sigma_max));
  }
  if (cfg.p_noise > 0.0 && rng.bernoulli(cfg.p_noise)) {
    photometric = true;
    for (double& v : frame.data) v += rng.normal(0.0, cfg.noise_std);
  }
  if (photometric) {
    for (double& v : frame.data) v = std::clamp(v, 0.0, 1.0);
  }
}

}  // namespace zeal

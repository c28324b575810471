// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "zeal/common.hpp"

namespace zeal {

// Interleaved 8-bit image, row-major, c in {1, 3}.
struct ImageU8 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;  // height * width * channels

  ImageU8() = default;
  ImageU8(int h, int w, int c, std::uint8_t fill = 0)
      : height(h),
        width(w),
        channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {}

  std::uint8_t& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool empty() const { return data.empty(); }
};

// Interleaved float image, values nominally in [0, 1].
struct ImageF {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  ImageF() = default;
  ImageF(int h, int w, int c, double fill = 0.0)
      : height(h),
        width(w),
        channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {}

  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool empty() const { return data.empty(); }
};

ImageF to_float(const ImageU8& img);
ImageU8 to_u8(const ImageF& img);

// Bilinear resize with half-pixel centers. Works for any channel count.
ImageF resize_bilinear(const ImageF& img, int out_h, int out_w);

// Rec.601 luma for RGB images; identity for single-channel.
double luminance(const ImageU8& img, int y, int x);

}  // namespace zeal

// SPDX-License-Identifier: Apache-2.0
#include "zeal/image.hpp"

#include <algorithm>
#include <cmath>

namespace zeal {

ImageF to_float(const ImageU8& img) {
  ImageF out(img.height, img.width, img.channels);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = static_cast<double>(img.data[i]) / 255.0;
  }
  return out;
}

ImageU8 to_u8(const ImageF& img) {
  ImageU8 out(img.height, img.width, img.channels);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const double v = std::clamp(img.data[i], 0.0, 1.0);
    out.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

ImageF resize_bilinear(const ImageF& img, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) {
    throw ArgumentError("resize_bilinear: output dims must be positive");
  }
  if (img.height == out_h && img.width == out_w) return img;

  ImageF out(out_h, out_w, img.channels);
  const double sy = static_cast<double>(img.height) / out_h;
  const double sx = static_cast<double>(img.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    const double wy = fy - y0;
    int y1 = std::min(y0 + 1, img.height - 1);
    y0 = std::clamp(y0, 0, img.height - 1);
    for (int x = 0; x < out_w; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      const double wx = fx - x0;
      int x1 = std::min(x0 + 1, img.width - 1);
      x0 = std::clamp(x0, 0, img.width - 1);
      for (int c = 0; c < img.channels; ++c) {
        const double top = img.at(y0, x0, c) * (1.0 - wx) + img.at(y0, x1, c) * wx;
        const double bot = img.at(y1, x0, c) * (1.0 - wx) + img.at(y1, x1, c) * wx;
        out.at(y, x, c) = top * (1.0 - wy) + bot * wy;
      }
    }
  }
  return out;
}

double luminance(const ImageU8& img, int y, int x) {
  if (img.channels == 1) return img.at(y, x, 0);
  return 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) +
         0.114 * img.at(y, x, 2);
}

}  // namespace zeal

// SPDX-License-Identifier: Apache-2.0
#include "zeal/mask/patch_grid.hpp"

#include <string>

namespace zeal {

PatchGrid patchify(const BinaryMask& mask, int patch) {
  if (patch <= 0) throw ArgumentError("patchify: patch size must be positive");
  if (mask.height <= 0 || mask.width <= 0) {
    throw ArgumentError("patchify: empty mask");
  }
  if (mask.height % patch != 0 || mask.width % patch != 0) {
    throw ArgumentError("patchify: patch " + std::to_string(patch) +
                        " does not divide mask dims " +
                        std::to_string(mask.height) + "x" +
                        std::to_string(mask.width));
  }

  const int rows = mask.height / patch;
  const int cols = mask.width / patch;
  PatchGrid grid(rows, cols, patch, mask.height, mask.width);
  const double denom = static_cast<double>(patch) * patch;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      long count = 0;
      for (int y = i * patch; y < (i + 1) * patch; ++y) {
        for (int x = j * patch; x < (j + 1) * patch; ++x) {
          count += mask.at(y, x) != 0 ? 1 : 0;
        }
      }
      grid.at(i, j) = static_cast<double>(count) / denom;
    }
  }
  return grid;
}

PatchGrid invert(const PatchGrid& grid) {
  PatchGrid out = grid;
  for (double& v : out.values) v = 1.0 - v;
  return out;
}

BinaryMask resize_mask_nearest(const BinaryMask& mask, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) {
    throw ArgumentError("resize_mask_nearest: output dims must be positive");
  }
  BinaryMask out(out_h, out_w, mask.frame_index);
  for (int y = 0; y < out_h; ++y) {
    int sy = static_cast<int>((static_cast<std::int64_t>(y) * mask.height) / out_h);
    if (sy >= mask.height) sy = mask.height - 1;
    for (int x = 0; x < out_w; ++x) {
      int sx = static_cast<int>((static_cast<std::int64_t>(x) * mask.width) / out_w);
      if (sx >= mask.width) sx = mask.width - 1;
      out.at(y, x) = mask.at(sy, sx);
    }
  }
  return out;
}

}  // namespace zeal

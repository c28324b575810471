// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "zeal/mask/boxes.hpp"

namespace zeal {

// Downsampled soft mask: one cell per p x p patch holding the foreground
// pixel ratio of that patch, in [0, 1].
struct PatchGrid {
  int rows = 0;           // source height / patch
  int cols = 0;           // source width / patch
  int patch = 0;          // p, in pixels
  int src_height = 0;
  int src_width = 0;
  std::vector<double> values;

  PatchGrid() = default;
  PatchGrid(int r, int c, int p, int h, int w)
      : rows(r), cols(c), patch(p), src_height(h), src_width(w),
        values(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int i, int j) {
    return values[static_cast<std::size_t>(i) * cols + j];
  }
  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * cols + j];
  }

  bool all_zero() const {
    for (double v : values) {
      if (v != 0.0) return false;
    }
    return true;
  }
};

// grid[i][j] = (count of 1-pixels in patch (i,j)) / p^2, computed by exact
// integer counting and a single division per cell. p must divide both mask
// dimensions; there is no padding policy.
PatchGrid patchify(const BinaryMask& mask, int patch);

// 1 - value, elementwise; dims and patch size unchanged.
PatchGrid invert(const PatchGrid& grid);

// Nearest-neighbor resize; keeps values binary.
BinaryMask resize_mask_nearest(const BinaryMask& mask, int out_h, int out_w);

}  // namespace zeal

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "zeal/image.hpp"
#include "zeal/mask/boxes.hpp"
#include "zeal/rng.hpp"
#include "zeal/train/config.hpp"

namespace zeal {

// Applies the configured transforms in place. Shift/scale/rotation are
// sampled once and applied as a single affine warp to BOTH the frame
// (bilinear, edge clamp) and the mask (nearest, zero outside), keeping the
// pair registered. Color jitter, blur and noise touch the frame only; the
// frame is re-clamped to [0,1] afterwards. With all probabilities zero the
// inputs are untouched bit for bit.
void augment_sample(ImageF& frame, BinaryMask& mask, const AugmentConfig& cfg,
                    Rng& rng);

}  // namespace zeal

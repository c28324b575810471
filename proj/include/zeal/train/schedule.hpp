// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "zeal/train/config.hpp"

namespace zeal {

// n indices evenly spaced over [0, frame_count-1]:
// index_k = round(k * (frame_count-1) / (n-1)), ascending; indices repeat
// when frame_count < n. n == 1 picks frame 0.
std::vector<int> sample_frames(int frame_count, int n = 160);

// Linear warmup 0 -> max_lr over warmup_epochs, then cosine decay to min_lr
// at epochs * steps_per_epoch. Pure function of the step.
double lr_at(std::int64_t step, int steps_per_epoch, const TrainConfig& cfg);

}  // namespace zeal

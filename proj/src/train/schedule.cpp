// SPDX-License-Identifier: Apache-2.0
#include "zeal/train/schedule.hpp"

#include <cmath>

#include "zeal/common.hpp"

namespace zeal {

std::vector<int> sample_frames(int frame_count, int n) {
  if (frame_count < 1) throw ArgumentError("sample_frames: frame_count < 1");
  if (n < 1) throw ArgumentError("sample_frames: n < 1");
  std::vector<int> idx(static_cast<size_t>(n), 0);
  if (n == 1) return idx;
  for (int k = 0; k < n; ++k) {
    idx[static_cast<size_t>(k)] = static_cast<int>(std::llround(
        static_cast<double>(k) * (frame_count - 1) / (n - 1)));
  }
  return idx;
}

double lr_at(std::int64_t step, int steps_per_epoch, const TrainConfig& cfg) {
  if (step < 0) throw ArgumentError("lr_at: negative step");
  if (steps_per_epoch < 1) throw ArgumentError("lr_at: steps_per_epoch < 1");
  const std::int64_t warmup_steps =
      static_cast<std::int64_t>(cfg.warmup_epochs) * steps_per_epoch;
  const std::int64_t total_steps =
      static_cast<std::int64_t>(cfg.epochs) * steps_per_epoch;
  if (step < warmup_steps) {
    return cfg.max_lr * static_cast<double>(step) /
           static_cast<double>(warmup_steps);
  }
  if (step >= total_steps) return cfg.min_lr;
  const double t = static_cast<double>(step - warmup_steps) /
                   static_cast<double>(total_steps - warmup_steps);
  return cfg.min_lr +
         0.5 * (cfg.max_lr - cfg.min_lr) * (1.0 + std::cos(M_PI * t));
}

}  // namespace zeal

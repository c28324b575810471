// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "zeal/data/dataset.hpp"

namespace zeal {

// Desk-scale verification substitute for bench-top surgical video data: a
// bright "tool" blob sweeps over a static per-video texture, and the score
// is a monotone function of how smoothly the blob moves.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  int n_videos = 8;          // >= 4 and divisible by 4
  int frames_per_video = 16; // >= 2
  int image_size = 64;       // multiple of 32 so the p=32 patch grid divides it
};

// Deterministic in the seed: identical spec -> bit-identical frames, scores
// and folds.
std::pair<std::vector<VideoSample>, FoldSpec> generate_synthetic_dataset(
    const SyntheticSpec& spec);

// Writes frames, manifest.json and folds.json under out_dir.
// Returns the manifest path.
std::filesystem::path write_synthetic_dataset(
    const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace zeal

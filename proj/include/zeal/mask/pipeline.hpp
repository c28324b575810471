// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zeal/data/dataset.hpp"
#include "zeal/mask/backend.hpp"
#include "zeal/mask/boxes.hpp"

namespace zeal {

struct MaskConfig {
  std::string text_prompt = "metallic tool";
  double box_threshold = 0.3;
  double iou_dedup = 0.5;
  // When true, a backend failure on a frame emits an all-zero mask and the
  // pipeline continues; when false the failure is rethrown with frame index.
  bool zero_mask_fallback = false;
};

// One mask per frame, in order. Frame t is segmented with
// merge_boxes(carried_{t-1}, detect(frame_t)); the merged set is carried to
// the next frame, so boxes persist through detector dropouts until replaced.
std::vector<BinaryMask> generate_video_masks(const VideoSample& video,
                                             const MaskConfig& config,
                                             SegmenterBackend& backend);

// Cache key recorded in the per-video sidecar; any mismatch invalidates the
// cached masks.
struct MaskCacheKey {
  std::string text_prompt;
  double box_threshold = 0.0;
  double iou_dedup = 0.0;
  std::string backend_id;

  bool operator==(const MaskCacheKey&) const = default;
};

std::filesystem::path video_mask_dir(const std::filesystem::path& cache_root,
                                     const std::string& video_id);

void write_video_mask_cache(const std::filesystem::path& cache_root,
                            const std::string& video_id,
                            const std::vector<BinaryMask>& masks,
                            const MaskCacheKey& key);

// Empty optional when the cache is absent, incomplete, or keyed differently.
std::optional<std::vector<BinaryMask>> load_video_mask_cache(
    const std::filesystem::path& cache_root, const std::string& video_id,
    const MaskCacheKey& key, int expected_frames);

// Cache-through wrapper. Sets *computed (when given) to whether the masks
// were generated on this call rather than read back.
std::vector<BinaryMask> ensure_video_masks(
    const std::filesystem::path& cache_root, const VideoSample& video,
    const MaskConfig& config, SegmenterBackend& backend,
    bool* computed = nullptr);

// Fraction of foreground pixels across all masks of one video.
double mean_foreground_ratio(const std::vector<BinaryMask>& masks);

}  // namespace zeal

// SPDX-License-Identifier: Apache-2.0
#include "zeal/mask/pipeline.hpp"

#include <fstream>

#include <json.hpp>

#include "zeal/common.hpp"
#include "zeal/png_io.hpp"

namespace zeal {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<BinaryMask> generate_video_masks(const VideoSample& video,
                                             const MaskConfig& config,
                                             SegmenterBackend& backend) {
  if (video.frames.empty()) {
    throw ArgumentError("video '" + video.id + "' has no decoded frames");
  }
  if (config.box_threshold < 0.0 || config.box_threshold > 1.0) {
    throw ArgumentError("box_threshold must lie in [0, 1]");
  }
  if (config.iou_dedup < 0.0 || config.iou_dedup > 1.0) {
    throw ArgumentError("iou_dedup must lie in [0, 1]");
  }

  std::vector<BinaryMask> out;
  out.reserve(video.frames.size());
  BoxSet carried;  // frame_index -1: the designated empty set before frame 0
  for (size_t t = 0; t < video.frames.size(); ++t) {
    const ImageU8& frame = video.frames[t];
    try {
      BoxSet curr = backend.detect(frame, config.text_prompt, config.box_threshold);
      curr.frame_index = static_cast<int>(t);
      BoxSet merged = merge_boxes(carried, curr, config.iou_dedup);
      BinaryMask mask = backend.segment(frame, merged);
      if (mask.height != frame.height || mask.width != frame.width) {
        throw PipelineError("backend returned a mask of mismatched size");
      }
      mask.frame_index = static_cast<int>(t);
      out.push_back(std::move(mask));
      carried = std::move(merged);
    } catch (const std::exception& e) {
      if (!config.zero_mask_fallback) {
        throw PipelineError("mask generation failed at frame " +
                            std::to_string(t) + " of video '" + video.id +
                            "': " + e.what());
      }
      BinaryMask mask;
      mask.height = frame.height;
      mask.width = frame.width;
      mask.frame_index = static_cast<int>(t);
      mask.grid.assign(static_cast<size_t>(frame.height) * frame.width, 0);
      out.push_back(std::move(mask));
      // Equivalent to merging the carried set with an empty detection.
      carried.frame_index = static_cast<int>(t);
    }
  }
  return out;
}

fs::path video_mask_dir(const fs::path& cache_root, const std::string& video_id) {
  return cache_root / video_id;
}

namespace {

json key_to_json(const MaskCacheKey& key, int frames, int height, int width) {
  json j;
  j["text_prompt"] = key.text_prompt;
  j["box_threshold"] = key.box_threshold;
  j["iou_dedup"] = key.iou_dedup;
  j["backend"] = key.backend_id;
  j["frame_count"] = frames;
  j["height"] = height;
  j["width"] = width;
  return j;
}

}  // namespace

void write_video_mask_cache(const fs::path& cache_root,
                            const std::string& video_id,
                            const std::vector<BinaryMask>& masks,
                            const MaskCacheKey& key) {
  if (masks.empty()) throw ArgumentError("no masks to cache");
  fs::path dir = video_mask_dir(cache_root, video_id);
  fs::create_directories(dir);
  for (size_t t = 0; t < masks.size(); ++t) {
    const BinaryMask& m = masks[t];
    ImageU8 img(m.height, m.width, 1);
    for (size_t i = 0; i < m.grid.size(); ++i) {
      img.data[i] = m.grid[i] ? 255 : 0;
    }
    write_png(dir / (std::to_string(t) + ".png"), img);
  }
  json meta = key_to_json(key, static_cast<int>(masks.size()), masks[0].height,
                          masks[0].width);
  std::ofstream out(dir / "meta.json");
  if (!out) throw PipelineError("cannot write mask cache sidecar in " + dir.string());
  out << meta.dump(2) << "\n";
}

std::optional<std::vector<BinaryMask>> load_video_mask_cache(
    const fs::path& cache_root, const std::string& video_id,
    const MaskCacheKey& key, int expected_frames) {
  fs::path dir = video_mask_dir(cache_root, video_id);
  fs::path meta_path = dir / "meta.json";
  std::ifstream in(meta_path);
  if (!in) return std::nullopt;
  json meta;
  try {
    in >> meta;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (meta.value("text_prompt", std::string()) != key.text_prompt ||
      meta.value("box_threshold", -1.0) != key.box_threshold ||
      meta.value("iou_dedup", -1.0) != key.iou_dedup ||
      meta.value("backend", std::string()) != key.backend_id ||
      meta.value("frame_count", -1) != expected_frames) {
    return std::nullopt;
  }
  std::vector<BinaryMask> masks;
  masks.reserve(static_cast<size_t>(expected_frames));
  for (int t = 0; t < expected_frames; ++t) {
    fs::path png = dir / (std::to_string(t) + ".png");
    if (!fs::exists(png)) return std::nullopt;
    ImageU8 img = read_png(png);
    if (img.channels != 1) return std::nullopt;
    BinaryMask m;
    m.height = img.height;
    m.width = img.width;
    m.frame_index = t;
    m.grid.resize(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
      m.grid[i] = img.data[i] >= 128 ? 1 : 0;
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

std::vector<BinaryMask> ensure_video_masks(const fs::path& cache_root,
                                           const VideoSample& video,
                                           const MaskConfig& config,
                                           SegmenterBackend& backend,
                                           bool* computed) {
  MaskCacheKey key{config.text_prompt, config.box_threshold, config.iou_dedup,
                   backend.identifier()};
  if (auto cached = load_video_mask_cache(cache_root, video.id, key,
                                          static_cast<int>(video.frames.size()))) {
    if (computed) *computed = false;
    return std::move(*cached);
  }
  std::vector<BinaryMask> masks = generate_video_masks(video, config, backend);
  write_video_mask_cache(cache_root, video.id, masks, key);
  if (computed) *computed = true;
  return masks;
}

double mean_foreground_ratio(const std::vector<BinaryMask>& masks) {
  if (masks.empty()) return 0.0;
  double total = 0.0;
  for (const BinaryMask& m : masks) {
    size_t on = 0;
    for (uint8_t v : m.grid) on += v;
    total += static_cast<double>(on) / static_cast<double>(m.grid.size());
  }
  return total / static_cast<double>(masks.size());
}

}  // namespace zeal

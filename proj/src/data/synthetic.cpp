// SPDX-License-Identifier: Apache-2.0
#include "zeal/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zeal/png_io.hpp"
#include "zeal/rng.hpp"

namespace zeal {

namespace fs = std::filesystem;

namespace {

void check_spec(const SyntheticSpec& spec) {
  if (spec.n_videos < 4 || spec.n_videos % 4 != 0) {
    throw ArgumentError("synthetic dataset: n_videos must be >= 4 and "
                        "divisible by 4");
  }
  if (spec.frames_per_video < 2) {
    throw ArgumentError("synthetic dataset: frames_per_video must be >= 2");
  }
  if (spec.image_size < 32 || spec.image_size % 32 != 0) {
    throw ArgumentError("synthetic dataset: image_size must be a positive "
                        "multiple of 32");
  }
}

// Static value-noise texture: coarse random grid, bilinearly upsampled.
ImageF make_texture(int size, Rng& rng) {
  const int coarse = 8;
  ImageF grid(coarse, coarse, 3);
  for (int y = 0; y < coarse; ++y) {
    for (int x = 0; x < coarse; ++x) {
      const double base = rng.uniform(0.08, 0.45);
      for (int c = 0; c < 3; ++c) {
        grid.at(y, x, c) = std::clamp(base + rng.uniform(-0.06, 0.06), 0.0, 1.0);
      }
    }
  }
  return resize_bilinear(grid, size, size);
}

void paint_blob(ImageF& frame, double cy, double cx, double radius) {
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius - 1)));
  const int y1 = std::min(frame.height - 1,
                          static_cast<int>(std::ceil(cy + radius + 1)));
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius - 1)));
  const int x1 = std::min(frame.width - 1,
                          static_cast<int>(std::ceil(cx + radius + 1)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = std::hypot(y - cy, x - cx);
      if (d > radius) continue;
      // Bright metallic-looking disk with a soft radial falloff.
      const double shade = 0.92 + 0.08 * (1.0 - d / radius);
      frame.at(y, x, 0) = shade;
      frame.at(y, x, 1) = shade;
      frame.at(y, x, 2) = std::min(1.0, shade * 1.02);
    }
  }
}

std::string video_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth_%03d", index);
  return buf;
}

}  // namespace

std::pair<std::vector<VideoSample>, FoldSpec> generate_synthetic_dataset(
    const SyntheticSpec& spec) {
  check_spec(spec);

  Rng root(spec.seed);
  const int n = spec.n_videos;
  const int frames = spec.frames_per_video;
  const int size = spec.image_size;

  // Smoothness levels are spread evenly over [0,1] and shuffled across ids so
  // the rotation folds do not stratify by score.
  std::vector<int> level(n);
  std::iota(level.begin(), level.end(), 0);
  {
    Rng shuffle_rng = root.fork("level-shuffle");
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.uniform_int(0, i));
      std::swap(level[static_cast<std::size_t>(i)],
                level[static_cast<std::size_t>(j)]);
    }
  }

  // One bench texture shared by every video, as with a fixed camera setup;
  // videos differ only in how the blob moves.
  Rng texture_rng = root.fork("texture");
  const ImageF texture = make_texture(size, texture_rng);

  std::vector<VideoSample> videos;
  videos.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double smoothness =
        static_cast<double>(level[static_cast<std::size_t>(i)]) / (n - 1);
    const double jerk = 1.0 - smoothness;

    VideoSample v;
    v.id = video_id(i);
    v.task = Task::SYNTH;
    v.grs = kGrsMin + static_cast<int>(std::lround((kGrsMax - kGrsMin) *
                                                   smoothness));

    const double radius = size / 8.0;
    const double amp = size * 0.30;
    const double cy0 = size / 2.0;
    const double cx0 = size / 2.0;
    const double wobble = jerk * size * 0.18;
    const double lo = radius;
    const double hi = size - 1.0 - radius;

    v.frames.reserve(static_cast<std::size_t>(frames));
    for (int t = 0; t < frames; ++t) {
      const double theta = 2.0 * M_PI * t / frames;
      // Smooth circular sweep plus a frame-rate zigzag whose amplitude is
      // the skill signal: unskilled motion oscillates around the path.
      double cy = cy0 + amp * std::sin(theta) + wobble * (t % 2 == 0 ? 1.0 : -1.0);
      double cx = cx0 + amp * std::cos(theta) + wobble * (t % 4 < 2 ? 1.0 : -1.0);
      cy = std::clamp(cy, lo, hi);
      cx = std::clamp(cx, lo, hi);

      ImageF frame = texture;
      paint_blob(frame, cy, cx, radius);
      v.frames.push_back(to_u8(frame));
    }
    videos.push_back(std::move(v));
  }

  std::vector<std::string> ids;
  ids.reserve(videos.size());
  for (const auto& v : videos) ids.push_back(v.id);
  FoldSpec folds = make_rotation_folds(ids);

  return {std::move(videos), std::move(folds)};
}

fs::path write_synthetic_dataset(const SyntheticSpec& spec,
                                 const fs::path& out_dir) {
  auto [videos, folds] = generate_synthetic_dataset(spec);

  std::error_code ec;
  fs::create_directories(out_dir / "videos", ec);
  if (ec) {
    throw PipelineError("write_synthetic_dataset: cannot create " +
                        (out_dir / "videos").string() + ": " + ec.message());
  }

  DatasetManifest manifest;
  manifest.root = "videos";
  for (const auto& v : videos) {
    const fs::path video_dir = out_dir / "videos" / v.id;
    fs::create_directories(video_dir);
    for (std::size_t t = 0; t < v.frames.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04zu.png", t);
      write_png(video_dir / name, v.frames[t]);
    }
    manifest.videos.push_back({v.id, v.id, v.task, v.grs});
  }
  manifest.fold_file = "folds.json";

  write_fold_spec(out_dir / "folds.json", folds);
  const fs::path manifest_path = out_dir / "manifest.json";
  write_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace zeal

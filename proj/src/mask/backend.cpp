// SPDX-License-Identifier: Apache-2.0
#include "zeal/mask/backend.hpp"

#include <algorithm>
#include <cmath>

#include "zeal/common.hpp"

namespace zeal {

std::string StubBackend::identifier() const {
  switch (mode_) {
    case Mode::Blob:
      return "stub-blob";
    case Mode::FixedBox:
      return "stub-fixed";
    case Mode::Scripted:
      return "stub-scripted";
    case Mode::None:
      return "stub-none";
  }
  return "stub";
}

BoxSet StubBackend::detect(const ImageU8& frame, const std::string& text_prompt,
                           double box_threshold) {
  (void)text_prompt;
  if (box_threshold < 0.0 || box_threshold > 1.0) {
    throw ArgumentError("box_threshold must lie in [0, 1]");
  }
  const int call = detect_calls_++;
  BoxSet out;
  switch (mode_) {
    case Mode::None:
      break;
    case Mode::FixedBox: {
      Box b = fixed_;
      if (b.confidence >= box_threshold) out.boxes.push_back(b);
      break;
    }
    case Mode::Scripted: {
      auto it = schedule_.find(call);
      if (it != schedule_.end()) {
        for (const Box& b : it->second) {
          if (b.confidence >= box_threshold) out.boxes.push_back(b);
        }
      }
      break;
    }
    case Mode::Blob: {
      double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
      bool any = false;
      for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
          if (luminance(frame, y, x) < blob_threshold_) continue;
          if (!any) {
            x_min = x;
            y_min = y;
            x_max = x + 1;
            y_max = y + 1;
            any = true;
          } else {
            x_min = std::min(x_min, static_cast<double>(x));
            y_min = std::min(y_min, static_cast<double>(y));
            x_max = std::max(x_max, static_cast<double>(x + 1));
            y_max = std::max(y_max, static_cast<double>(y + 1));
          }
        }
      }
      if (any) {
        // Confidence scales with blob size so box_threshold has a real
        // effect: a full-frame blob maps to 1.0, a single pixel near 0.35.
        double frac = (x_max - x_min) * (y_max - y_min) /
                      (static_cast<double>(frame.width) * frame.height);
        double conf = std::min(1.0, 0.35 + 0.65 * std::sqrt(frac) * 4.0);
        Box b{x_min, y_min, x_max, y_max, conf};
        if (conf >= box_threshold) out.boxes.push_back(b);
      }
      break;
    }
  }
  return out;
}

BinaryMask StubBackend::segment(const ImageU8& frame, const BoxSet& boxes) {
  BinaryMask mask;
  mask.height = frame.height;
  mask.width = frame.width;
  mask.frame_index = boxes.frame_index;
  mask.grid.assign(static_cast<size_t>(frame.height) * frame.width, 0);
  for (const Box& raw : boxes.boxes) {
    Box b = clip_box(raw, frame.height, frame.width);
    int x0 = static_cast<int>(std::floor(b.x_min));
    int y0 = static_cast<int>(std::floor(b.y_min));
    int x1 = static_cast<int>(std::ceil(b.x_max));
    int y1 = static_cast<int>(std::ceil(b.y_max));
    x0 = std::clamp(x0, 0, frame.width);
    y0 = std::clamp(y0, 0, frame.height);
    x1 = std::clamp(x1, 0, frame.width);
    y1 = std::clamp(y1, 0, frame.height);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        mask.grid[static_cast<size_t>(y) * frame.width + x] = 1;
      }
    }
  }
  return mask;
}

std::unique_ptr<SegmenterBackend> make_backend(const std::string& name) {
  if (name == "stub") return std::make_unique<StubBackend>();
  if (name == "external") {
    throw ArgumentError(
        "backend 'external' requires an adapter binary; point "
        "ZEAL_EXTERNAL_BACKEND at a grounded-detector service and use the "
        "masks subcommand of that adapter to populate the cache, then rerun "
        "with --backend stub --cache-only");
  }
  throw ArgumentError("unknown backend '" + name + "' (expected stub|external)");
}

}  // namespace zeal

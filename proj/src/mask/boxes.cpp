// SPDX-License-Identifier: Apache-2.0
#include "zeal/mask/boxes.hpp"

#include <algorithm>
#include <string>

namespace zeal {

double box_iou(const Box& a, const Box& b) {
  if (!a.valid() || !b.valid()) {
    throw ArgumentError("box_iou: invalid box");
  }
  const double ix_min = std::max(a.x_min, b.x_min);
  const double iy_min = std::max(a.y_min, b.y_min);
  const double ix_max = std::min(a.x_max, b.x_max);
  const double iy_max = std::min(a.y_max, b.y_max);
  const double iw = std::max(0.0, ix_max - ix_min);
  const double ih = std::max(0.0, iy_max - iy_min);
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

BoxSet merge_boxes(const BoxSet& prev, const BoxSet& curr, double iou_dedup) {
  if (iou_dedup < 0.0 || iou_dedup > 1.0) {
    throw ArgumentError("merge_boxes: iou_dedup must lie in [0,1]");
  }
  if (!prev.empty() && prev.frame_index != curr.frame_index - 1) {
    throw ArgumentError(
        "merge_boxes: prev frame_index " + std::to_string(prev.frame_index) +
        " is not the predecessor of " + std::to_string(curr.frame_index));
  }

  BoxSet out;
  out.frame_index = curr.frame_index;
  out.boxes = curr.boxes;
  for (const Box& p : prev.boxes) {
    bool drop = false;
    for (const Box& c : curr.boxes) {
      if (p == c || box_iou(p, c) > iou_dedup) {
        drop = true;
        break;
      }
    }
    if (!drop) out.boxes.push_back(p);
  }
  return out;
}

Box clip_box(const Box& b, int height, int width) {
  Box out = b;
  out.x_min = std::clamp(out.x_min, 0.0, static_cast<double>(width));
  out.x_max = std::clamp(out.x_max, 0.0, static_cast<double>(width));
  out.y_min = std::clamp(out.y_min, 0.0, static_cast<double>(height));
  out.y_max = std::clamp(out.y_max, 0.0, static_cast<double>(height));
  if (!out.valid()) {
    throw ArgumentError("clip_box: box lies outside the frame");
  }
  return out;
}

}  // namespace zeal

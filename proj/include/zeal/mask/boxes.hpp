// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "zeal/common.hpp"

namespace zeal {

// Axis-aligned detection box in pixel coordinates, half-open on nothing:
// x_min < x_max and y_min < y_max are required.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  double confidence = 0.0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool valid() const { return x_min < x_max && y_min < y_max; }
  bool operator==(const Box& o) const {
    return x_min == o.x_min && y_min == o.y_min && x_max == o.x_max &&
           y_max == o.y_max;
  }
};

// Detections for one frame. frame_index -1 denotes the designated empty set
// that precedes the first frame.
struct BoxSet {
  std::vector<Box> boxes;
  int frame_index = -1;

  bool empty() const { return boxes.empty(); }
  std::size_t size() const { return boxes.size(); }
};

// Per-frame binary tool mask; values are 0/1.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> grid;
  int frame_index = 0;

  BinaryMask() = default;
  BinaryMask(int h, int w, int frame = 0)
      : height(h), width(w), grid(static_cast<std::size_t>(h) * w, 0),
        frame_index(frame) {}

  std::uint8_t& at(int y, int x) {
    return grid[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int y, int x) const {
    return grid[static_cast<std::size_t>(y) * width + x];
  }
};

// Standard intersection-over-union of two valid boxes.
double box_iou(const Box& a, const Box& b);

// Union of previous and current detections: current boxes always survive,
// previous boxes are dropped when their IoU with any current box exceeds
// iou_dedup (and exact duplicates are always dropped). Result carries the
// current frame index.
BoxSet merge_boxes(const BoxSet& prev, const BoxSet& curr, double iou_dedup);

// Clips a box to [0,w]x[0,h]; throws if nothing remains.
Box clip_box(const Box& b, int height, int width);

}  // namespace zeal

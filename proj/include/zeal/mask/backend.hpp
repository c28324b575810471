// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "zeal/image.hpp"
#include "zeal/mask/boxes.hpp"

namespace zeal {

// Open-set detector + box-promptable segmenter pair. The production model
// (a text-grounded detector feeding a promptable segmenter) lives behind
// this interface as an external adapter; the stub below is the deterministic
// in-repo implementation used by the pipeline and all tests.
//
// Contract: detect returns only boxes with confidence >= box_threshold;
// segment of an empty BoxSet is the all-zero mask. Instances must be safe to
// invoke from one thread at a time.
class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;

  // Stable identifier recorded in cache sidecars for invalidation.
  virtual std::string identifier() const = 0;

  virtual BoxSet detect(const ImageU8& frame, const std::string& text_prompt,
                        double box_threshold) = 0;
  virtual BinaryMask segment(const ImageU8& frame, const BoxSet& boxes) = 0;
};

// Deterministic stand-in backend.
//   Blob      — detects the bounding box of bright pixels (works on the
//               synthetic data, where the tool is the bright region).
//   FixedBox  — always returns one configured box.
//   Scripted  — per-call box schedule, for exercising the temporal merge.
//   None      — never detects anything.
// segment fills the union of the (clipped) boxes.
class StubBackend : public SegmenterBackend {
 public:
  enum class Mode { Blob, FixedBox, Scripted, None };

  StubBackend() : mode_(Mode::Blob) {}
  explicit StubBackend(Mode mode) : mode_(mode) {}

  static StubBackend fixed_box(const Box& box) {
    StubBackend b(Mode::FixedBox);
    b.fixed_ = box;
    return b;
  }

  // schedule[t] is returned by the t-th detect call; missing entries mean no
  // detection on that call.
  static StubBackend scripted(std::map<int, std::vector<Box>> schedule) {
    StubBackend b(Mode::Scripted);
    b.schedule_ = std::move(schedule);
    return b;
  }

  std::string identifier() const override;
  BoxSet detect(const ImageU8& frame, const std::string& text_prompt,
                double box_threshold) override;
  BinaryMask segment(const ImageU8& frame, const BoxSet& boxes) override;

  // Luminance cut (0-255 scale) for Blob mode.
  void set_blob_threshold(double t) { blob_threshold_ = t; }

 private:
  Mode mode_;
  Box fixed_;
  std::map<int, std::vector<Box>> schedule_;
  int detect_calls_ = 0;
  double blob_threshold_ = 200.0;
};

// Factory for CLI backend names ("stub" | "external"). "external" is the
// documented integration point for a real grounded-detector + segmenter
// service; requesting it without an adapter raises an actionable error.
std::unique_ptr<SegmenterBackend> make_backend(const std::string& name);

}  // namespace zeal

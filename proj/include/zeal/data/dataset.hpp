// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "zeal/image.hpp"

namespace zeal {

enum class Task { SU, NP, KT, SYNTH };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

inline constexpr int kGrsMin = 6;
inline constexpr int kGrsMax = 30;

// One video with its ground-truth global rating score. Frames may be decoded
// eagerly at load time or on demand from media_path.
struct VideoSample {
  std::string id;
  Task task = Task::SYNTH;
  int grs = kGrsMin;
  std::filesystem::path media_path;
  std::vector<ImageU8> frames;

  bool decoded() const { return !frames.empty(); }
};

struct VideoRecord {
  std::string id;
  std::string path;  // relative to manifest root, or absolute
  Task task = Task::SYNTH;
  int grs = kGrsMin;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<VideoRecord> videos;
  std::filesystem::path fold_file;  // empty when the manifest names no folds
};

// Decodes a media path into an ordered frame sequence. The default
// implementation reads a directory of numbered PNG images; video containers
// require an external decoder behind this interface.
class FrameDecoder {
 public:
  virtual ~FrameDecoder() = default;
  virtual std::vector<ImageU8> decode(const std::filesystem::path& media,
                                      const std::string& video_id) const = 0;
};

class ImageDirDecoder : public FrameDecoder {
 public:
  std::vector<ImageU8> decode(const std::filesystem::path& media,
                              const std::string& video_id) const override;
};

struct LoadOptions {
  bool decode_frames = true;
  std::shared_ptr<const FrameDecoder> decoder;  // defaults to ImageDirDecoder
};

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const std::filesystem::path& manifest_path,
                    const DatasetManifest& manifest);

// Loads every record into a VideoSample, validating ids, score ranges and
// media existence. Order follows the manifest.
std::vector<VideoSample> load_dataset(const std::filesystem::path& manifest_path,
                                      const LoadOptions& options = {});

// Decodes frames for a sample in place if they are not present yet.
void ensure_decoded(VideoSample& video, const FrameDecoder& decoder);

// ---- Fold specification ------------------------------------------------

struct FoldAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

inline constexpr int kFoldCount = 4;

struct FoldSpec {
  std::array<FoldAssignment, kFoldCount> folds;
};

// Checks all FoldSpec invariants against the dataset ids: partitions
// disjoint with union equal to the dataset, sizes 2:1:1 (exact when the
// dataset size is divisible by 4), every id tested exactly once.
void validate_fold_spec(const FoldSpec& spec, const std::set<std::string>& ids);

FoldSpec load_fold_spec(const std::filesystem::path& path,
                        const std::set<std::string>& dataset_ids);
void write_fold_spec(const std::filesystem::path& path, const FoldSpec& spec);

// Deterministic 4-fold rotation over sorted ids: fold f tests block f and
// validates block (f+1) mod 4.
FoldSpec make_rotation_folds(std::vector<std::string> ids);

}  // namespace zeal

// SPDX-License-Identifier: Apache-2.0
#include "zeal/data/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include <json.hpp>

#include "zeal/png_io.hpp"

namespace zeal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string task_name(Task t) {
  switch (t) {
    case Task::SU: return "SU";
    case Task::NP: return "NP";
    case Task::KT: return "KT";
    case Task::SYNTH: return "SYNTH";
  }
  throw ArgumentError("task_name: unknown task");
}

Task task_from_name(const std::string& name) {
  if (name == "SU") return Task::SU;
  if (name == "NP") return Task::NP;
  if (name == "KT") return Task::KT;
  if (name == "SYNTH") return Task::SYNTH;
  throw DataError("unknown task '" + name + "' (expected SU, NP, KT or SYNTH)");
}

namespace {

// Numbered-frame ordering: sort by the trailing integer in the stem when one
// exists, otherwise lexicographically.
long frame_sort_key(const fs::path& p, bool& numeric) {
  const std::string stem = p.stem().string();
  std::size_t end = stem.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(stem[end - 1]))) {
    --end;
  }
  if (end == stem.size()) {
    numeric = false;
    return 0;
  }
  numeric = true;
  return std::stol(stem.substr(end));
}

json parse_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(std::string(what) + ": cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(what) + ": parse failure in " + path.string() +
                    ": " + e.what());
  }
}

}  // namespace

std::vector<ImageU8> ImageDirDecoder::decode(const fs::path& media,
                                             const std::string& video_id) const {
  if (!fs::is_directory(media)) {
    throw DataError("video '" + video_id + "': media path " + media.string() +
                    " is not a frame directory; video container decoding is "
                    "not bundled — extract frames to numbered PNGs or supply "
                    "a FrameDecoder adapter");
  }
  std::vector<std::pair<std::pair<bool, long>, fs::path>> entries;
  for (const auto& e : fs::directory_iterator(media)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    if (ext != ".png" && ext != ".PNG") continue;
    bool numeric = false;
    const long key = frame_sort_key(e.path(), numeric);
    entries.push_back({{!numeric, key}, e.path()});
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return a.second.filename().string() < b.second.filename().string();
            });
  if (entries.empty()) {
    throw DataError("video '" + video_id + "': no PNG frames in " +
                    media.string());
  }

  std::vector<ImageU8> frames;
  frames.reserve(entries.size());
  for (const auto& [key, path] : entries) {
    frames.push_back(read_png(path));
    const ImageU8& f = frames.back();
    if (f.height != frames.front().height || f.width != frames.front().width) {
      throw DataError("video '" + video_id + "': frame dimension mismatch at " +
                      path.string());
    }
  }
  return frames;
}

DatasetManifest read_manifest(const fs::path& manifest_path) {
  const json doc = parse_json_file(manifest_path, "manifest");
  const fs::path base = manifest_path.parent_path();

  DatasetManifest m;
  fs::path root = doc.value("root", std::string("."));
  m.root = root.is_absolute() ? root : base / root;

  if (!doc.contains("videos") || !doc["videos"].is_array()) {
    throw DataError("manifest: missing 'videos' array in " +
                    manifest_path.string());
  }
  for (const auto& v : doc["videos"]) {
    VideoRecord rec;
    rec.id = v.at("id").get<std::string>();
    rec.path = v.at("path").get<std::string>();
    rec.task = task_from_name(v.at("task").get<std::string>());
    rec.grs = v.at("grs").get<int>();
    m.videos.push_back(std::move(rec));
  }
  if (doc.contains("folds") && !doc["folds"].is_null()) {
    fs::path folds = doc["folds"].get<std::string>();
    m.fold_file = folds.is_absolute() ? folds : base / folds;
  }
  return m;
}

void write_manifest(const fs::path& manifest_path, const DatasetManifest& m) {
  json doc;
  doc["root"] = m.root.string();
  json videos = json::array();
  for (const auto& v : m.videos) {
    videos.push_back({{"id", v.id},
                      {"path", v.path},
                      {"task", task_name(v.task)},
                      {"grs", v.grs}});
  }
  doc["videos"] = videos;
  if (!m.fold_file.empty()) doc["folds"] = m.fold_file.string();

  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) {
    throw DataError("write_manifest: cannot write " + manifest_path.string());
  }
  out << doc.dump(2) << "\n";
}

std::vector<VideoSample> load_dataset(const fs::path& manifest_path,
                                      const LoadOptions& options) {
  const DatasetManifest m = read_manifest(manifest_path);
  std::shared_ptr<const FrameDecoder> decoder = options.decoder;
  if (!decoder) decoder = std::make_shared<ImageDirDecoder>();

  std::set<std::string> seen;
  std::vector<VideoSample> out;
  out.reserve(m.videos.size());
  for (const auto& rec : m.videos) {
    if (!seen.insert(rec.id).second) {
      throw DataError("manifest: duplicate video id '" + rec.id + "'");
    }
    if (rec.grs < kGrsMin || rec.grs > kGrsMax) {
      throw DataError("video '" + rec.id + "': grs " + std::to_string(rec.grs) +
                      " outside [" + std::to_string(kGrsMin) + "," +
                      std::to_string(kGrsMax) + "]");
    }
    VideoSample v;
    v.id = rec.id;
    v.task = rec.task;
    v.grs = rec.grs;
    fs::path p = rec.path;
    v.media_path = p.is_absolute() ? p : m.root / p;
    if (!fs::exists(v.media_path)) {
      throw DataError("video '" + rec.id + "': media path " +
                      v.media_path.string() + " does not exist");
    }
    if (options.decode_frames) {
      v.frames = decoder->decode(v.media_path, v.id);
    }
    out.push_back(std::move(v));
  }
  return out;
}

void ensure_decoded(VideoSample& video, const FrameDecoder& decoder) {
  if (!video.decoded()) {
    video.frames = decoder.decode(video.media_path, video.id);
  }
}

// ---- Fold specification ------------------------------------------------

void validate_fold_spec(const FoldSpec& spec, const std::set<std::string>& ids) {
  const std::size_t n = ids.size();
  const std::size_t quarter_lo = n / 4;
  const std::size_t quarter_hi = (n + 3) / 4;

  std::map<std::string, int> tested_count;
  for (const auto& id : ids) tested_count[id] = 0;

  for (int f = 0; f < kFoldCount; ++f) {
    const FoldAssignment& fold = spec.folds[static_cast<std::size_t>(f)];
    std::set<std::string> assigned;
    auto check_part = [&](const std::vector<std::string>& part,
                          const char* name) {
      for (const auto& id : part) {
        if (!ids.count(id)) {
          throw DataError("fold " + std::to_string(f) + ": unknown id '" + id +
                          "' in " + name);
        }
        if (!assigned.insert(id).second) {
          throw DataError("fold " + std::to_string(f) + ": id '" + id +
                          "' assigned to more than one partition");
        }
      }
    };
    check_part(fold.train, "train");
    check_part(fold.val, "val");
    check_part(fold.test, "test");
    if (assigned.size() != n) {
      throw DataError("fold " + std::to_string(f) +
                      ": partitions do not cover the dataset (" +
                      std::to_string(assigned.size()) + " of " +
                      std::to_string(n) + " ids)");
    }
    const std::size_t vs = fold.val.size();
    const std::size_t ts = fold.test.size();
    const bool exact = (n % 4) == 0;
    if (exact) {
      if (vs != n / 4 || ts != n / 4) {
        throw DataError("fold " + std::to_string(f) +
                        ": partition sizes violate 2:1:1 (val=" +
                        std::to_string(vs) + ", test=" + std::to_string(ts) +
                        ", n=" + std::to_string(n) + ")");
      }
    } else if (vs < quarter_lo || vs > quarter_hi || ts < quarter_lo ||
               ts > quarter_hi) {
      throw DataError("fold " + std::to_string(f) +
                      ": partition sizes violate 2:1:1 (val=" +
                      std::to_string(vs) + ", test=" + std::to_string(ts) +
                      ", n=" + std::to_string(n) + ")");
    }
    for (const auto& id : fold.test) tested_count[id] += 1;
  }

  for (const auto& [id, count] : tested_count) {
    if (count != 1) {
      throw DataError("id '" + id + "' appears in the test partition of " +
                      std::to_string(count) + " folds (expected exactly 1)");
    }
  }
}

FoldSpec load_fold_spec(const fs::path& path,
                        const std::set<std::string>& dataset_ids) {
  const json doc = parse_json_file(path, "fold spec");
  if (!doc.contains("folds") || !doc["folds"].is_array()) {
    throw DataError("fold spec: missing 'folds' array in " + path.string());
  }
  if (doc["folds"].size() != kFoldCount) {
    throw DataError("fold spec: expected " + std::to_string(kFoldCount) +
                    " folds, got " + std::to_string(doc["folds"].size()));
  }
  FoldSpec spec;
  for (int f = 0; f < kFoldCount; ++f) {
    const auto& jf = doc["folds"][static_cast<std::size_t>(f)];
    FoldAssignment& fold = spec.folds[static_cast<std::size_t>(f)];
    fold.train = jf.at("train").get<std::vector<std::string>>();
    fold.val = jf.at("val").get<std::vector<std::string>>();
    fold.test = jf.at("test").get<std::vector<std::string>>();
  }
  validate_fold_spec(spec, dataset_ids);
  return spec;
}

void write_fold_spec(const fs::path& path, const FoldSpec& spec) {
  json folds = json::array();
  for (const auto& fold : spec.folds) {
    folds.push_back(
        {{"train", fold.train}, {"val", fold.val}, {"test", fold.test}});
  }
  json doc;
  doc["folds"] = folds;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("write_fold_spec: cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

FoldSpec make_rotation_folds(std::vector<std::string> ids) {
  if (ids.size() < kFoldCount) {
    throw ArgumentError("make_rotation_folds: need at least 4 ids");
  }
  std::sort(ids.begin(), ids.end());

  // Contiguous blocks over sorted ids, sizes as even as possible.
  const std::size_t n = ids.size();
  std::array<std::vector<std::string>, kFoldCount> blocks;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < kFoldCount; ++b) {
    const std::size_t len = n / kFoldCount + (b < n % kFoldCount ? 1 : 0);
    blocks[b].assign(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                     ids.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }

  FoldSpec spec;
  for (int f = 0; f < kFoldCount; ++f) {
    FoldAssignment& fold = spec.folds[static_cast<std::size_t>(f)];
    fold.test = blocks[static_cast<std::size_t>(f)];
    fold.val = blocks[static_cast<std::size_t>((f + 1) % kFoldCount)];
    for (int b = 0; b < kFoldCount; ++b) {
      if (b == f || b == (f + 1) % kFoldCount) continue;
      const auto& blk = blocks[static_cast<std::size_t>(b)];
      fold.train.insert(fold.train.end(), blk.begin(), blk.end());
    }
  }
  return spec;
}

}  // namespace zeal

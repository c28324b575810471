// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "zeal/tensor.hpp"

namespace zeal {

// Flat binary tensor container: magic, JSON header (metadata + array
// directory), then raw little-endian float64 payloads. Used for feature
// caches and checkpoints.
struct TensorFile {
  nlohmann::json metadata;                // free-form, written into the header
  std::map<std::string, Tensor> arrays;   // name -> tensor (sorted for determinism)

  void save(const std::filesystem::path& path) const;
  static TensorFile load(const std::filesystem::path& path);
};

}  // namespace zeal

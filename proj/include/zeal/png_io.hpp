// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "zeal/image.hpp"

namespace zeal {

// Reads an 8-bit PNG; palette/low-depth/alpha inputs are expanded to
// gray or RGB. Throws PipelineError on decode failure.
ImageU8 read_png(const std::filesystem::path& path);

// Writes gray (c=1) or RGB (c=3). Deterministic output: no time chunk.
void write_png(const std::filesystem::path& path, const ImageU8& img);

}  // namespace zeal

// SPDX-License-Identifier: Apache-2.0
#include "zeal/tensor_file.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace zeal {

namespace {

constexpr char kMagic[8] = {'Z', 'E', 'A', 'L', 'T', 'N', 'S', 'R'};

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void TensorFile::save(const std::filesystem::path& path) const {
  nlohmann::json header;
  header["metadata"] = metadata;
  nlohmann::json dir = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : arrays) {
    nlohmann::json entry;
    entry["shape"] = t.shape;
    entry["dtype"] = "f64";
    entry["offset"] = offset;
    entry["count"] = t.size();
    dir[name] = entry;
    offset += t.size() * sizeof(double);
  }
  header["arrays"] = dir;
  const std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PipelineError("TensorFile: cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, header_str.size());
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const auto& [name, t] : arrays) {
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw PipelineError("TensorFile: write failed for " + path.string());
}

TensorFile TensorFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("TensorFile: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw PipelineError("TensorFile: bad magic in " + path.string());
  }
  const std::uint64_t header_len = read_u64(in);
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw PipelineError("TensorFile: truncated header in " + path.string());

  nlohmann::json header = nlohmann::json::parse(header_str);
  TensorFile tf;
  tf.metadata = header.value("metadata", nlohmann::json::object());
  const auto payload_start = in.tellg();
  for (const auto& [name, entry] : header.at("arrays").items()) {
    Tensor t(entry.at("shape").get<std::vector<int>>());
    const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
    const std::uint64_t count = entry.at("count").get<std::uint64_t>();
    if (count != t.size()) {
      throw PipelineError("TensorFile: shape/count mismatch for '" + name + "'");
    }
    in.seekg(payload_start + static_cast<std::streamoff>(offset));
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) {
      throw PipelineError("TensorFile: truncated payload for '" + name + "'");
    }
    tf.arrays.emplace(name, std::move(t));
  }
  return tf;
}

}  // namespace zeal

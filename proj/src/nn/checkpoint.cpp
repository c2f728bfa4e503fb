// SPDX-License-Identifier: Apache-2.0
#include "radarppg/nn/checkpoint.hpp"

#include "radarppg/io/binary.hpp"

namespace radarppg::nn {

const NamedArray& Checkpoint::find(const std::string& name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return a;
  }
  throw FormatError("checkpoint has no tensor named '" + name + "'", 8);
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json manifest = ckpt.manifest;
  manifest["format_version"] = kCheckpointVersion;
  auto& list = manifest["tensors"] = nlohmann::json::array();
  for (const auto& a : ckpt.arrays) {
    if (shape_numel(a.shape) != a.values.size()) throw ShapeError("save_checkpoint: '" + a.name + "' size mismatch");
    list.push_back({{"name", a.name}, {"shape", a.shape}});
  }
  io::BinaryWriter w(path);
  w.write_header("RVNN", manifest);
  for (const auto& a : ckpt.arrays) w.write_f32(a.values);
  w.close();
}

Checkpoint load_checkpoint(const std::string& path) {
  io::BinaryReader r(path);
  Checkpoint ckpt;
  ckpt.manifest = r.read_header("RVNN");
  const int version = ckpt.manifest.value("format_version", 0);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version), 8);
  }
  for (const auto& entry : ckpt.manifest.at("tensors")) {
    NamedArray a;
    a.name = entry.at("name").get<std::string>();
    a.shape = entry.at("shape").get<Shape>();
    a.values = r.read_f32(shape_numel(a.shape), a.name.c_str());
    ckpt.arrays.push_back(std::move(a));
  }
  r.expect_end();
  ckpt.manifest.erase("tensors");
  return ckpt;
}

}  // namespace radarppg::nn

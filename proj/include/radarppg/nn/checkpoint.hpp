// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "radarppg/nn/tensor.hpp"

namespace radarppg::nn {

// RVNN layout: "RVNN" | u32 H | JSON manifest {format_version, tensors:
// [{name, shape}], ...caller fields} | float32 arrays in manifest order.

inline constexpr int kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  nlohmann::json manifest;
  std::vector<NamedArray> arrays;

  const NamedArray& find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace radarppg::nn

// Copyright 2026 NAST Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NAST_CHECKPOINT_H_
#define NAST_CHECKPOINT_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nast/matrix.hpp"

namespace nast {

// Tensor container:
//   8-byte magic | u32 version=1 | u32 json_len | json utf-8
//   | u32 tensor_count | per tensor: u32 name_len, name, NASTFEAT blob.
struct Container {
  std::string json_text;
  std::vector<std::pair<std::string, FloatMat>> tensors;
};

void write_container(const std::filesystem::path& path, const std::string& magic,
                     const Container& c);
Container read_container(const std::filesystem::path& path, const std::string& magic);

inline constexpr const char* kCheckpointMagic = "NASTCKPT";
inline constexpr const char* kKMeansMagic = "NASTKMNS";

}  // namespace nast

#endif  // NAST_CHECKPOINT_H_

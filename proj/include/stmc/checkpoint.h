// Copyright 2026 STMC Authors
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

#ifndef STMC_CHECKPOINT_H_
#define STMC_CHECKPOINT_H_

#include <string>
#include <utility>
#include <vector>

#include "stmc/ndarray.h"
#include "stmc/params.h"

namespace stmc {

// Container format shared by checkpoints and optimizer state files:
// magic "STMC", u32 version, u32 entry count, then per entry a
// length-prefixed UTF-8 path, the shape and row-major little-endian f32
// payload.
struct NamedArrays {
  std::vector<std::pair<std::string, NdArray<float>>> entries;

  const NdArray<float>* find(const std::string& name) const {
    for (const auto& [n, a] : entries)
      if (n == name) return &a;
    return nullptr;
  }
};

void write_stmc_file(const std::string& path, const NamedArrays& arrays);
NamedArrays read_stmc_file(const std::string& path);

// Model parameters in creation order.
template <typename T>
void save_checkpoint(const std::string& path, ParameterStore<T>& store);

// Every constructed parameter must be present with its exact shape; files
// with missing, extra or reshaped entries are rejected.
template <typename T>
void load_checkpoint(const std::string& path, ParameterStore<T>& store);

}  // namespace stmc

#endif  // STMC_CHECKPOINT_H_
